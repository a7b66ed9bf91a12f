#include "hkglab/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "hkglab/subop.hpp"

namespace hkglab {

void PhysParams::validate() const {
  if (!std::isfinite(b) || !std::isfinite(m)) throw InputError("b and m must be finite");
  if (b < 0.0 || m < 0.0) throw InputError("b and m must be nonnegative");
}

NonlinearSpec NonlinearSpec::power(double p, double kappa) {
  NonlinearSpec s;
  s.kind = Kind::power;
  s.p = p;
  s.kappa = kappa;
  s.validate();
  return s;
}

NonlinearSpec NonlinearSpec::custom(std::function<cplx(cplx)> f, std::function<double(cplx)> F,
                                    double alpha) {
  NonlinearSpec s;
  s.kind = Kind::custom;
  s.f_custom = std::move(f);
  s.F_custom = std::move(F);
  s.alpha_custom = alpha;
  s.validate();
  return s;
}

double NonlinearSpec::alpha() const { return kind == Kind::power ? p + 1.0 : alpha_custom; }

void NonlinearSpec::validate() const {
  if (kind == Kind::power) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InputError("power exponent p must be > 1");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InputError("kappa must be >= 0");
  } else {
    if (!f_custom || !F_custom) throw InputError("custom nonlinearity needs f and F");
    if (!std::isfinite(alpha_custom)) throw InputError("custom alpha must be finite");
  }
}

namespace {

// |z|^e from |z|^2, exact for the common integer exponents.
double abs_pow(double r2, double e) {
  if (e == 1.0) return std::sqrt(r2);
  if (e == 2.0) return r2;
  if (e == 3.0) return r2 * std::sqrt(r2);
  if (e == 4.0) return r2 * r2;
  if (e == 6.0) return r2 * r2 * r2;
  return std::pow(r2, 0.5 * e);
}

}  // namespace

cplx f_eval(const NonlinearSpec& spec, cplx z) {
  if (spec.kind == NonlinearSpec::Kind::power) {
    const double r2 = std::norm(z);
    if (r2 == 0.0) return 0.0;
    return spec.kappa * abs_pow(r2, spec.p - 1.0) * z;
  }
  const cplx w = spec.f_custom(z);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
    throw NumericalError("custom f returned a non-finite value at |z| = " +
                         std::to_string(std::abs(z)));
  return w;
}

double F_eval(const NonlinearSpec& spec, cplx z) {
  if (spec.kind == NonlinearSpec::Kind::power)
    return spec.kappa * abs_pow(std::norm(z), spec.p + 1.0) / (spec.p + 1.0);
  const double w = spec.F_custom(z);
  if (!std::isfinite(w))
    throw NumericalError("custom F returned a non-finite value at |z| = " +
                         std::to_string(std::abs(z)));
  return w;
}

double sampled_condition_violation(const NonlinearSpec& spec, double radius) {
  const double alpha = spec.alpha();
  double worst = -std::numeric_limits<double>::infinity();
  constexpr int kRadii = 40;
  constexpr int kAngles = 8;
  for (int k = 0; k <= kRadii; ++k) {
    const double r = radius * k / kRadii;
    for (int a = 0; a < kAngles; ++a) {
      const cplx z = std::polar(r, 2.0 * std::numbers::pi * a / kAngles);
      const double lhs = alpha * F_eval(spec, z);
      const double rhs = (f_eval(spec, z) * std::conj(z)).real();
      worst = std::max(worst, (lhs - rhs) / (1.0 + std::abs(rhs)));
    }
  }
  return worst;
}

void require_admissible(const NonlinearSpec& spec) {
  spec.validate();
  if (spec.kind == NonlinearSpec::Kind::custom) {
    if (std::abs(f_eval(spec, 0.0)) != 0.0) throw HypothesisError("custom f must satisfy f(0) = 0");
    if (sampled_condition_violation(spec) > 1e-12)
      throw HypothesisError("custom nonlinearity violates alpha F(u) <= Re[f(u) conj(u)]");
  }
}

double nonlinear_stiffness(const NonlinearSpec& spec, double amplitude) {
  if (spec.kind == NonlinearSpec::Kind::power)
    return spec.kappa * spec.p * std::pow(amplitude, spec.p - 1.0);
  if (amplitude <= 0.0) return 0.0;
  constexpr double kRel = 1e-3;
  const double hi = std::abs(f_eval(spec, amplitude * (1.0 + kRel)));
  const double lo = std::abs(f_eval(spec, amplitude * (1.0 - kRel)));
  return std::abs(hi - lo) / (2.0 * kRel * amplitude);
}

Field acceleration(const State& state, const PhysParams& params, const NonlinearSpec& spec,
                   const Forcing* forcing) {
  require_same_grid(state.u, state.v);
  Field acc = sublaplacian(state.u);
  const auto u = state.u.values();
  const auto v = state.v.values();
  auto a = acc.values();
  for (std::size_t c = 0; c < a.size(); ++c)
    a[c] += -params.m * u[c] - params.b * v[c] + f_eval(spec, u[c]);
  if (forcing) forcing->add_to(acc, state.tau);
  acc.update_validity();
  return acc;
}

double stable_dt(double spectral_bound, double m, double cfl_fraction, double stiffness) {
  const double rate2 = spectral_bound + m + stiffness;
  if (!(rate2 > 0.0)) return std::numeric_limits<double>::infinity();
  return cfl_fraction * kRk4ImaginaryStability / std::sqrt(rate2);
}

namespace {

// out = base + scale * incr
Field axpy(const Field& base, double scale, const Field& incr) {
  Field out = base;
  auto o = out.values();
  const auto d = incr.values();
  for (std::size_t c = 0; c < o.size(); ++c) o[c] += scale * d[c];
  return out;
}

}  // namespace

State step(const State& s, double dt, const PhysParams& params, const NonlinearSpec& spec,
           const Forcing* forcing, double dt_max) {
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  if (dt > dt_max) throw InputError("time step exceeds the stability limit");
  const double h2 = 0.5 * dt;

  const Field& k1u = s.v;
  const Field k1v = acceleration(s, params, spec, forcing);

  State s2{axpy(s.u, h2, k1u), axpy(s.v, h2, k1v), s.tau + h2};
  const Field& k2u = s2.v;
  const Field k2v = acceleration(s2, params, spec, forcing);

  State s3{axpy(s.u, h2, k2u), axpy(s.v, h2, k2v), s.tau + h2};
  const Field& k3u = s3.v;
  const Field k3v = acceleration(s3, params, spec, forcing);

  State s4{axpy(s.u, dt, k3u), axpy(s.v, dt, k3v), s.tau + dt};
  const Field& k4u = s4.v;
  const Field k4v = acceleration(s4, params, spec, forcing);

  State out{s.u, s.v, s.tau + dt};
  auto u = out.u.values();
  auto v = out.v.values();
  const double w = dt / 6.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    u[c] += w * (k1u[c] + 2.0 * k2u[c] + 2.0 * k3u[c] + k4u[c]);
    v[c] += w * (k1v[c] + 2.0 * k2v[c] + 2.0 * k3v[c] + k4v[c]);
  }
  out.u.update_validity();
  out.v.update_validity();
  return out;
}

}  // namespace hkglab
