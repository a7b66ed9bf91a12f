#include <CLI11.hpp>
#include <iostream>

#include "hkglab_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace hkglab::cli;
  CLI::App app{"hkglab: damped Klein-Gordon lab on the Heisenberg group"};
  app.require_subcommand(1);

  std::string sim_cfg, cert_cfg;
  auto* sim = app.add_subcommand("simulate", "integrate a config and write trace, summary and plots");
  sim->add_option("config", sim_cfg, "config file")->required();
  auto* cer = app.add_subcommand("certify", "print the blow-up certificate for a config");
  cer->add_option("config", cert_cfg, "config file")->required();

  std::vector<int> levels{17, 33, 65};
  double kappa = 1.0;
  auto* conv = app.add_subcommand("convergence", "manufactured-solution refinement ladder");
  conv->add_option("--levels", levels, "grid sizes N (cubes N^3), at least three")->delimiter(',');
  conv->add_option("--kappa", kappa, "nonlinearity strength");

  std::string inject;
  auto* self = app.add_subcommand("selftest", "fast invariant suite");
  self->add_option("--inject", inject, "test fixture: flip-y or wrong-alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::config_error;
  }

  if (*sim) return cmd_simulate(sim_cfg, std::cout, std::cerr);
  if (*cer) return cmd_certify(cert_cfg, std::cout, std::cerr);
  if (*conv) return cmd_convergence(levels, kappa, std::cout, std::cerr);
  try {
    return cmd_selftest(mutation_from_string(inject), std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_code::config_error;
  }
}
