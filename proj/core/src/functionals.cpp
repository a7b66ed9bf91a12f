#include "hkglab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hkglab/subop.hpp"

namespace hkglab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double F_integral(const Field& u, const NonlinearSpec& spec) {
  const auto a = u.values();
  return tree_sum(a.size(), [&](std::size_t i) { return F_eval(spec, a[i]); }) * u.grid().h_vol();
}

double re_f_u(const Field& u, const NonlinearSpec& spec) {
  const auto a = u.values();
  return tree_sum(a.size(),
                  [&](std::size_t i) { return (f_eval(spec, a[i]) * std::conj(a[i])).real(); }) *
         u.grid().h_vol();
}

const DiagnosticsRow* find_row(const Trace& trace, double tau) {
  auto it = std::lower_bound(trace.rows.begin(), trace.rows.end(), tau,
                             [](const DiagnosticsRow& r, double t) { return r.tau < t; });
  if (it != trace.rows.end() && it->tau == tau) return &*it;
  return nullptr;
}

double M_of_row(const DiagnosticsRow& r, double b, double T0, double norm_u0_sq) {
  return r.l2_u_sq + r.b_int_u_sq + b * (T0 - r.tau) * norm_u0_sq;
}

// Three-point derivatives on a nonuniform grid around the middle sample.
struct Deriv {
  double d1, d2;
};

Deriv centered(double t0, double t1, double t2, double f0, double f1, double f2) {
  const double h1 = t1 - t0;
  const double h2 = t2 - t1;
  const double d1 = -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 +
                    h1 / (h2 * (h1 + h2)) * f2;
  const double d2 = 2.0 * (f0 / (h1 * (h1 + h2)) - f1 / (h1 * h2) + f2 / (h2 * (h1 + h2)));
  return {d1, d2};
}

}  // namespace

std::string to_string(RunTag tag) {
  switch (tag) {
    case RunTag::running: return "running";
    case RunTag::completed: return "completed";
    case RunTag::blowup_detected: return "blowup_detected";
    case RunTag::nonfinite_abort: return "nonfinite_abort";
  }
  return "running";
}

StateMeasures measure(const State& s, const NonlinearSpec& spec) {
  require_same_grid(s.u, s.v);
  StateMeasures m{};
  m.l2_u_sq = l2_norm_sq(s.u);
  m.l2_v_sq = l2_norm_sq(s.v);
  m.gradh_sq = grad_h_norm_sq(s.u);
  m.linf_u = linf_norm(s.u);
  m.F_int = F_integral(s.u, spec);
  m.re_fu_u = re_f_u(s.u, spec);
  m.re_uv = inner(s.u, s.v).real();
  return m;
}

TraceBuilder::TraceBuilder(Trace& trace, const PhysParams& params, const NonlinearSpec& spec,
                           std::optional<double> T0)
    : trace_(trace), params_(params), spec_(spec), T0_(T0) {
  trace_.params = params;
  trace_.T0 = T0;
}

const DiagnosticsRow& TraceBuilder::append(const State& s, std::int64_t step) {
  if (!trace_.rows.empty() && !(s.tau > trace_.rows.back().tau))
    throw InputError("trace times must be strictly increasing");
  const StateMeasures ms = measure(s, spec_);
  DiagnosticsRow r;
  r.step = step;
  r.tau = s.tau;
  r.l2_u_sq = ms.l2_u_sq;
  r.l2_v_sq = ms.l2_v_sq;
  r.gradh_sq = ms.gradh_sq;
  r.linf_u = ms.linf_u;
  r.F_int = ms.F_int;
  r.re_fu_u = ms.re_fu_u;
  r.re_uv = ms.re_uv;
  r.E = energy_from_parts(r.l2_v_sq, r.l2_u_sq, r.gradh_sq, r.F_int, params_.m);
  r.I = params_.m * r.l2_u_sq + r.gradh_sq - r.re_fu_u;
  r.A = 2.0 * r.re_uv + params_.b * r.l2_u_sq;
  if (!trace_.rows.empty()) {
    const DiagnosticsRow& p = trace_.rows.back();
    const double dt = r.tau - p.tau;
    r.b_int_v_sq = p.b_int_v_sq + params_.b * 0.5 * dt * (p.l2_v_sq + r.l2_v_sq);
    r.b_int_u_sq = p.b_int_u_sq + params_.b * 0.5 * dt * (p.l2_u_sq + r.l2_u_sq);
    r.diss_residual = r.E + r.b_int_v_sq - trace_.rows.front().E;
  }
  const double u0_sq = trace_.rows.empty() ? r.l2_u_sq : trace_.rows.front().l2_u_sq;
  r.M = (T0_ && r.tau <= *T0_) ? M_of_row(r, params_.b, *T0_, u0_sq) : kNaN;
  trace_.rows.push_back(r);
  return trace_.rows.back();
}

double energy_from_parts(double l2_v_sq, double l2_u_sq, double gradh_sq, double F_int, double m) {
  return 0.5 * l2_v_sq + 0.5 * m * l2_u_sq + 0.5 * gradh_sq - F_int;
}

double energy(const Field& u, const Field& v, const PhysParams& params, const NonlinearSpec& spec) {
  require_same_grid(u, v);
  return energy_from_parts(l2_norm_sq(v), l2_norm_sq(u), grad_h_norm_sq(u), F_integral(u, spec),
                           params.m);
}

double nehari(const Field& u, const PhysParams& params, const NonlinearSpec& spec) {
  return params.m * l2_norm_sq(u) + grad_h_norm_sq(u) - re_f_u(u, spec);
}

double aux_A(const Field& u, const Field& v, const PhysParams& params) {
  return 2.0 * inner(u, v).real() + params.b * l2_norm_sq(u);
}

double aux_M(const Trace& trace, double tau, double T0) {
  if (trace.rows.empty()) throw InputError("empty trace");
  if (!(tau >= 0.0) || tau > T0) throw InputError("M is defined for 0 <= tau <= T0");
  const double b = trace.params.b;
  const double u0 = trace.rows.front().l2_u_sq;
  if (const DiagnosticsRow* r = find_row(trace, tau)) return M_of_row(*r, b, T0, u0);
  auto hi = std::lower_bound(trace.rows.begin(), trace.rows.end(), tau,
                             [](const DiagnosticsRow& r, double t) { return r.tau < t; });
  if (hi == trace.rows.begin() || hi == trace.rows.end())
    throw InputError("tau outside the recorded trace");
  const DiagnosticsRow& a = *(hi - 1);
  const DiagnosticsRow& c = *hi;
  const double w = (tau - a.tau) / (c.tau - a.tau);
  return (1.0 - w) * M_of_row(a, b, T0, u0) + w * M_of_row(c, b, T0, u0);
}

double dissipation_residual(const Trace& trace, double tau) {
  const DiagnosticsRow* r = find_row(trace, tau);
  if (!r) throw InputError("tau is not a recorded trace time");
  return r->E + r->b_int_v_sq - trace.rows.front().E;
}

CertificateReport certificate(const CertificateInputs& in) {
  if (!(in.alpha > 2.0)) throw HypothesisError("the blow-up certificate needs alpha > 2");
  CertificateReport r;
  r.in = in;
  r.alpha_ok = true;
  r.params_positive = in.b > 0.0 && in.m > 0.0 && in.T0 > 0.0 && std::isfinite(in.T0);
  r.mu = std::max({in.b, in.m, in.alpha});
  r.omega = in.alpha - 1.0 - in.m * (in.alpha - 2.0) / (r.mu + 1.0);
  r.sigma = (r.omega - 1.0) / 4.0;
  r.corr_threshold =
      in.m > 0.0 ? in.alpha * (r.mu + 1.0) / (in.m * (in.alpha - 2.0)) * in.E0 : kNaN;
  r.nehari_negative = in.I_u0 < 0.0;
  r.correlation_ok = in.re_u0u1 >= r.corr_threshold;
  if (in.re_u0u1 > 0.0) {
    const double M0 = (in.b * in.T0 + 1.0) * in.norm_u0_sq;
    r.T_star_thm = 2.0 * (r.mu + 1.0) * (in.b * in.T0 + 1.0) /
                   ((in.alpha - 2.0) * (r.mu + 1.0 - in.m)) * in.norm_u0_sq / in.re_u0u1;
    r.T_star_M = M0 / (r.sigma * 2.0 * in.re_u0u1);
  } else {
    r.T_star_thm = kNaN;
    r.T_star_M = kNaN;
  }
  r.valid = r.params_positive && r.alpha_ok && r.nehari_negative && r.correlation_ok &&
            in.re_u0u1 > 0.0;
  return r;
}

std::string certificate_json(const CertificateReport& r, int indent) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["valid"] = r.valid;
  j["mu"] = num(r.mu);
  j["omega"] = num(r.omega);
  j["sigma"] = num(r.sigma);
  j["T_star_thm"] = num(r.T_star_thm);
  j["T_star_M"] = num(r.T_star_M);
  j["I_u0"] = num(r.in.I_u0);
  j["E0"] = num(r.in.E0);
  j["corr"] = num(r.in.re_u0u1);
  j["corr_threshold"] = num(r.corr_threshold);
  j["b"] = num(r.in.b);
  j["m"] = num(r.in.m);
  j["alpha"] = num(r.in.alpha);
  j["T0"] = num(r.in.T0);
  j["norm_u0_sq"] = num(r.in.norm_u0_sq);
  j["params_positive"] = r.params_positive;
  j["alpha_ok"] = r.alpha_ok;
  j["nehari_negative"] = r.nehari_negative;
  j["correlation_ok"] = r.correlation_ok;
  return j.dump(indent);
}

MonitorSeries trace_monitors(const Trace& trace, const CertificateReport& rep) {
  const auto& rows = trace.rows;
  if (rows.size() < 3) throw InputError("monitors need at least three trace rows");
  const double omega = rep.omega;
  const double alpha = rep.in.alpha;
  const double m = rep.in.m;

  MonitorSeries out;
  out.A_threshold = m > 0.0 ? 2.0 * alpha * (rep.mu + 1.0) * rep.in.E0 / (m * (alpha - 2.0)) : kNaN;
  out.rows.resize(rows.size());
  const double tau_last = rows.back().tau;
  double worst_mid = 0.0;
  bool any_mid = false;
  out.I_negative_throughout = true;
  out.A_above_throughout = true;
  out.eta_min = std::numeric_limits<double>::infinity();
  out.Q_min = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < rows.size(); ++k) {
    const DiagnosticsRow& r = rows[k];
    MonitorRow& mr = out.rows[k];
    mr.tau = r.tau;
    mr.dA_identity = 2.0 * r.l2_v_sq - 2.0 * r.I;
    mr.I_negative = r.I < 0.0;
    mr.A_above = r.A > out.A_threshold;
    mr.eta = -(omega + 1.0) * r.l2_v_sq - (omega + 3.0) * r.b_int_v_sq - 2.0 * r.I;
    mr.dA_fd = kNaN;
    mr.A_relerr = kNaN;
    mr.Q = kNaN;
    out.I_negative_throughout = out.I_negative_throughout && mr.I_negative;
    out.A_above_throughout = out.A_above_throughout && mr.A_above;
    out.eta_min = std::min(out.eta_min, mr.eta);

    if (k == 0 || k + 1 == rows.size()) continue;
    const DiagnosticsRow& a = rows[k - 1];
    const DiagnosticsRow& c = rows[k + 1];
    mr.dA_fd = centered(a.tau, r.tau, c.tau, a.A, r.A, c.A).d1;
    const double diff = std::abs(mr.dA_fd - mr.dA_identity);
    if (mr.dA_identity != 0.0)
      mr.A_relerr = diff / std::abs(mr.dA_identity);
    else
      mr.A_relerr = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (r.tau >= 0.25 * tau_last && r.tau <= 0.75 * tau_last) {
      worst_mid = std::max(worst_mid, mr.A_relerr);
      any_mid = true;
    }
    if (std::isfinite(a.M) && std::isfinite(r.M) && std::isfinite(c.M)) {
      const Deriv d = centered(a.tau, r.tau, c.tau, a.M, r.M, c.M);
      mr.Q = d.d2 * r.M - 0.25 * (omega + 3.0) * d.d1 * d.d1;
      out.Q_min = std::min(out.Q_min, mr.Q);
    }
  }
  out.A_identity_maxrelerr = any_mid ? worst_mid : kNaN;
  if (!std::isfinite(out.Q_min)) out.Q_min = kNaN;
  return out;
}

TestFunction bump_function(int n, const BumpSpec& bump, double amplitude) {
  std::vector<double> center(2 * n + 1, 0.0);
  center[2 * n] = bump.center_s;
  return TestFunction::gaussian(n, amplitude, bump.width, center);
}

CertificateInputs measure_certificate_inputs(const Field& u0, const Field& u1,
                                             const PhysParams& params, const NonlinearSpec& spec,
                                             double T0) {
  CertificateInputs in;
  in.b = params.b;
  in.m = params.m;
  in.alpha = spec.alpha();
  in.T0 = T0;
  in.norm_u0_sq = l2_norm_sq(u0);
  in.re_u0u1 = inner(u0, u1).real();
  in.E0 = energy(u0, u1, params, spec);
  in.I_u0 = nehari(u0, params, spec);
  return in;
}

PreparedData prepare_blowup_data(const BoxGrid& grid, const PhysParams& params,
                                 const NonlinearSpec& spec, double T0, const BumpSpec& bump,
                                 double velocity_ratio) {
  if (spec.kind != NonlinearSpec::Kind::power)
    throw InputError("blow-up data preparation needs the power nonlinearity");
  if (!(velocity_ratio > 0.0)) throw InputError("velocity ratio c must be positive");
  params.validate();

  const Field shape = sample(grid, bump_function(grid.n(), bump));
  const double B2 = l2_norm_sq(shape);
  const double G2 = grad_h_norm_sq(shape);
  if (!(B2 > 0.0)) throw InputError("bump vanishes on the grid");
  const double c = velocity_ratio;
  const double alpha = spec.alpha();

  constexpr double kStart = 1e-2;
  constexpr double kFactor = 1.05;
  constexpr double kCap = 1e6;
  Field u0(grid);
  for (double lambda = kStart; lambda <= kCap; lambda *= kFactor) {
    for (std::size_t i = 0; i < shape.size(); ++i) u0[i] = lambda * shape[i];
    const double l2 = lambda * lambda;
    const double I = params.m * l2 * B2 + l2 * G2 - re_f_u(u0, spec);
    if (!(I < 0.0)) continue;
    const double E0 =
        energy_from_parts(c * c * l2 * B2, l2 * B2, l2 * G2, F_integral(u0, spec), params.m);
    const double mu = std::max({params.b, params.m, alpha});
    if (params.m > 0.0 && c * l2 * B2 < alpha * (mu + 1.0) / (params.m * (alpha - 2.0)) * E0)
      continue;

    PreparedData out;
    out.amplitude = lambda;
    out.u0 = u0;
    out.u1 = u0;
    for (auto& z : out.u1.values()) z *= c;
    out.report = certificate(measure_certificate_inputs(out.u0, out.u1, params, spec, T0));
    if (out.report.valid) return out;
  }
  throw NumericalError("no amplitude up to 1e6 satisfies I(u0) < 0 and the correlation condition");
}

}  // namespace hkglab
