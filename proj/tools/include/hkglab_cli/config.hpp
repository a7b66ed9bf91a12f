#pragma once

// Flat `key = value` run configuration.

#include <filesystem>
#include <optional>
#include <string>

#include "hkglab/functionals.hpp"
#include "hkglab/grid.hpp"

namespace hkglab::cli {

/// Invalid or unreadable configuration (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InitKind { gaussian, constant, eigenmode, synthetic_cert };

struct RunConfig {
  int n = 1;
  Boundary bc = Boundary::dirichlet;
  int N_x = 33, N_y = 33, N_s = 33;
  double L_xy = 6.0, L_s = 12.0;

  double b = 1.0, m = 1.0;
  double p = 2.0, kappa = 1.0;

  InitKind init = InitKind::gaussian;
  std::optional<double> amplitude;  ///< empty means "auto"
  double width = 1.5;
  double center_s = 0.0;
  double velocity_ratio = 4.0;

  double T0 = 3.0;
  // synthetic_cert only
  double cert_norm_u0_sq = 1.0;
  double cert_re_u0u1 = 4.0;
  double cert_E0 = 0.25;
  double cert_I_u0 = -1.0;

  double cfl_fraction = 0.5;
  double t_end = 1.0;
  int output_every = 1;
  double linf_threshold = 1e6;
  int fit_window = 20;

  std::string output_dir = "out";
  bool svg = true;

  BoxGrid grid() const;
  PhysParams params() const { return {b, m}; }
  NonlinearSpec spec() const { return NonlinearSpec::power(p, kappa); }
};

/// Parses config text. Unknown keys, duplicates, malformed values and
/// out-of-range values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Normalized echo: every key in fixed order, one `key = value` per line.
std::string echo(const RunConfig& cfg);

std::string to_string(InitKind k);

}  // namespace hkglab::cli
