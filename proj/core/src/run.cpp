#include "hkglab/run.hpp"

#include <cmath>
#include <deque>
#include <vector>

#include "hkglab/subop.hpp"

namespace hkglab {

void SimulationConfig::validate() const {
  params.validate();
  spec.validate();
  require_same_grid(initial.u, initial.v);
  if (!(cfl_fraction > 0.0) || cfl_fraction > 1.0) throw InputError("cfl_fraction must be in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InputError("t_end must be finite and >= 0");
  if (output_every < 1) throw InputError("output_every must be >= 1");
  if (!(linf_threshold > 0.0)) throw InputError("linf_threshold must be positive");
  if (fit_window < 8) throw InputError("fit_window must be >= 8");
  if (max_halvings < 0) throw InputError("max_halvings must be >= 0");
  if (!(growth_trigger > 0.0)) throw InputError("growth_trigger must be positive");
  if (T0 && !(*T0 > 0.0)) throw InputError("T0 must be positive");
  if (!initial.u.valid() || !initial.v.valid()) throw InputError("initial data is not finite");
}

std::optional<double> estimate_blowup_time(std::span<const double> tau,
                                           std::span<const double> linf, double p, int window) {
  if (tau.size() != linf.size()) throw InputError("tau and linf lengths differ");
  if (!(p > 1.0)) throw InputError("estimate needs p > 1");
  const std::size_t count = std::min<std::size_t>(tau.size(), static_cast<std::size_t>(window));
  if (count < 8) return std::nullopt;
  const std::size_t first = tau.size() - count;
  for (std::size_t i = first + 1; i < tau.size(); ++i)
    if (!(linf[i] > linf[i - 1]) || !(tau[i] > tau[i - 1])) return std::nullopt;

  const double expo = -(p - 1.0) / 2.0;
  double tm = 0.0, ym = 0.0;
  std::vector<double> y(count);
  for (std::size_t i = 0; i < count; ++i) {
    y[i] = std::pow(linf[first + i], expo);
    tm += tau[first + i];
    ym += y[i];
  }
  tm /= count;
  ym /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = tau[first + i] - tm;
    sxx += dx * dx;
    sxy += dx * (y[i] - ym);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) return std::nullopt;
  const double t_star = tm - ym / slope;
  if (!std::isfinite(t_star)) return std::nullopt;
  return t_star;
}

RunResult run(const SimulationConfig& cfg) {
  cfg.validate();
  require_admissible(cfg.spec);

  RunResult res;
  res.trace.config_echo = cfg.config_echo;
  res.final_state = cfg.initial;
  res.trace.params = cfg.params;
  res.trace.T0 = cfg.T0;
  if (cfg.t_end == 0.0) {
    res.trace.status = {RunTag::completed, cfg.initial.tau, std::nullopt};
    return res;
  }

  const BoxGrid& grid = cfg.initial.u.grid();
  res.spectral_bound = cfg.spectral_bound ? *cfg.spectral_bound : spectral_bound(grid).value;
  res.dt_initial = stable_dt(res.spectral_bound, cfg.params.m, cfg.cfl_fraction);
  const double tau_end = cfg.initial.tau + cfg.t_end;

  TraceBuilder builder(res.trace, cfg.params, cfg.spec, cfg.T0);
  State state = cfg.initial;
  builder.append(state, 0);

  std::deque<double> hist_tau{state.tau};
  std::deque<double> hist_linf{linf_norm(state.u)};
  const auto window = static_cast<std::size_t>(cfg.fit_window);

  double dt = res.dt_initial;
  RunStatus status{RunTag::running, state.tau, std::nullopt};
  std::int64_t steps = 0;
  const double linf0 = hist_linf.back();
  const bool nonlinear = cfg.spec.kind == NonlinearSpec::Kind::custom || cfg.spec.kappa > 0.0;

  while (status.tag == RunTag::running) {
    const double stiff = nonlinear_stiffness(cfg.spec, hist_linf.back());
    while (res.halvings < cfg.max_halvings &&
           dt > stable_dt(res.spectral_bound, cfg.params.m, cfg.cfl_fraction, stiff)) {
      dt *= 0.5;
      ++res.halvings;
    }
    const double remaining = tau_end - state.tau;
    const bool last = dt >= remaining;
    const double h = last ? remaining : dt;

    State next = step(state, h, cfg.params, cfg.spec, cfg.forcing);
    if (!next.u.valid() || !next.v.valid()) {
      status = {RunTag::nonfinite_abort, state.tau, std::nullopt};
      break;
    }
    if (last) next.tau = tau_end;
    state = std::move(next);
    ++steps;

    const double linf = linf_norm(state.u);
    const double growth = linf / hist_linf.back() - 1.0;
    if (nonlinear && linf > linf0 && growth > cfg.growth_trigger &&
        res.halvings < cfg.max_halvings) {
      dt *= 0.5;
      ++res.halvings;
    }
    hist_tau.push_back(state.tau);
    hist_linf.push_back(linf);
    if (hist_tau.size() > window) {
      hist_tau.pop_front();
      hist_linf.pop_front();
    }

    const bool blown = linf >= cfg.linf_threshold;
    if (steps % cfg.output_every == 0 || last || blown) builder.append(state, steps);
    if (blown) {
      std::vector<double> t(hist_tau.begin(), hist_tau.end());
      std::vector<double> l(hist_linf.begin(), hist_linf.end());
      const double p = cfg.spec.kind == NonlinearSpec::Kind::power ? cfg.spec.p : cfg.spec.alpha() - 1.0;
      status = {RunTag::blowup_detected, state.tau, estimate_blowup_time(t, l, p, cfg.fit_window)};
    } else if (last) {
      status = {RunTag::completed, state.tau, std::nullopt};
    }
  }

  res.trace.status = status;
  res.final_state = std::move(state);
  res.steps = steps;
  return res;
}

}  // namespace hkglab
