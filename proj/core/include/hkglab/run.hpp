#pragma once

// Fixed-step time loop with diagnostics recording and blow-up detection.

#include <cstdint>
#include <optional>
#include <span>

#include "hkglab/functionals.hpp"

namespace hkglab {

struct SimulationConfig {
  PhysParams params;
  NonlinearSpec spec = NonlinearSpec::power(2.0, 1.0);
  State initial;
  const Forcing* forcing = nullptr;

  double cfl_fraction = 0.5;
  double t_end = 1.0;
  int output_every = 1;
  double linf_threshold = 1e6;
  int fit_window = 20;
  int max_halvings = 20;
  /// Blow-up onset: |u|_inf above its initial value and growing by more
  /// than this fraction per step. Each detection halves dt.
  double growth_trigger = 0.01;
  std::optional<double> T0;
  /// Reuse a precomputed spectral bound instead of running power iteration.
  std::optional<double> spectral_bound;
  std::string config_echo;

  void validate() const;
};

struct RunResult {
  Trace trace;
  State final_state;
  double spectral_bound = 0.0;
  double dt_initial = 0.0;
  int halvings = 0;
  std::int64_t steps = 0;
};

/// Integrates to t_end or until |u|_inf reaches linf_threshold. The step
/// starts at dt0 = cfl * 2.8 / sqrt(spectral_bound + m) and is halved (at
/// most max_halvings times in total) on blow-up onset, and whenever the
/// nonlinear stiffness kappa p |u|^{p-1} pushes dt past the stability limit.
/// A row is recorded at tau = 0, every output_every steps and at the final
/// step.
RunResult run(const SimulationConfig& config);

/// Blow-up time from the trailing samples of |u|_inf: least-squares fit of
/// |u|_inf^{-(p-1)/2} against tau, returning the zero crossing of the line.
/// Unavailable (nullopt) with fewer than 8 samples in the window, a tail
/// that is not strictly increasing, or a non-negative fitted slope.
std::optional<double> estimate_blowup_time(std::span<const double> tau,
                                           std::span<const double> linf, double p,
                                           int window = 20);

}  // namespace hkglab
