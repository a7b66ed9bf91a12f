#pragma once

// The four subcommands, split into pure computations and thin wrappers
// that touch the filesystem and map outcomes to exit codes.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hkglab/run.hpp"
#include "hkglab_cli/config.hpp"

namespace hkglab::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 2;
inline constexpr int certificate_invalid = 3;
inline constexpr int numerical_abort = 4;
inline constexpr int blowup = 10;
}  // namespace exit_code

struct InitialData {
  State state;
  CertificateReport report;
  double amplitude = 0.0;
  std::vector<std::string> warnings;
};

/// Builds (u0, u1) from the init.* keys and certifies them. Not available
/// for synthetic_cert.
InitialData build_initial(const RunConfig& cfg);

/// Certificate for any init kind; synthetic_cert uses the cert.* inputs.
CertificateReport certify(const RunConfig& cfg, std::vector<std::string>* warnings = nullptr);

struct SimulationOutput {
  RunResult result;
  CertificateReport report;
  std::optional<MonitorSeries> monitors;
  std::string csv;
  std::string summary;
  std::map<std::string, std::string> svgs;  ///< file name -> content
  std::vector<std::string> warnings;
};

SimulationOutput simulate(const RunConfig& cfg);

int cmd_simulate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_certify(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

struct ConvergenceLevel {
  int N = 0;
  double h = 0.0;
  double error = 0.0;  ///< max |u - u_exact| at t_end
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> pair_orders;
  double order = 0.0;  ///< least-squares slope of log error against log h
};

/// Manufactured Gaussian-bump ladder on cubes N^3. Needs >= 3 distinct
/// levels; throws ConfigError otherwise.
ConvergenceResult convergence_ladder(const std::vector<int>& levels, double kappa);

int cmd_convergence(const std::vector<int>& levels, double kappa, std::ostream& out,
                    std::ostream& err);

/// Deliberate defects for checking that the self-test notices them.
enum class Mutation { none, flip_y_coupling, wrong_alpha };
Mutation mutation_from_string(const std::string& s);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> selftest(Mutation mutation = Mutation::none);
int cmd_selftest(Mutation mutation, std::ostream& out);

}  // namespace hkglab::cli
