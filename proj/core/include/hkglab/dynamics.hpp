#pragma once

// Semi-discrete damped Klein-Gordon system
//
//   u_tt - L_h u + b u_t + m u = f(u) + S(., tau)
//
// integrated as the first-order system (u, v = u_tau) with the classical
// 4-stage Runge-Kutta scheme.

#include <functional>
#include <limits>
#include <string>

#include "hkglab/grid.hpp"

namespace hkglab {

struct PhysParams {
  double b = 1.0;  ///< damping
  double m = 1.0;  ///< mass

  void validate() const;
  /// b > 0 and m > 0, as the blow-up theorem requires.
  bool theorem_mode() const { return b > 0.0 && m > 0.0; }
};

/// F(z) = g(|z|) with f(z) = g'(|z|) z / |z|.
struct NonlinearSpec {
  enum class Kind { power, custom };

  Kind kind = Kind::power;
  double p = 2.0;
  double kappa = 1.0;
  std::function<cplx(cplx)> f_custom;
  std::function<double(cplx)> F_custom;
  double alpha_custom = 0.0;

  /// f(u) = kappa |u|^{p-1} u, F(u) = kappa |u|^{p+1} / (p+1).
  static NonlinearSpec power(double p, double kappa);
  static NonlinearSpec custom(std::function<cplx(cplx)> f, std::function<double(cplx)> F,
                              double alpha);

  /// Exponent in alpha F(u) <= Re[f(u) conj(u)]; p+1 for the power kind.
  double alpha() const;
  void validate() const;
};

cplx f_eval(const NonlinearSpec& spec, cplx z);
double F_eval(const NonlinearSpec& spec, cplx z);

/// Largest violation of alpha F(z) <= Re[f(z) conj(z)] over a fixed sample of
/// complex arguments with |z| <= radius. Zero or negative means the sampled
/// condition holds.
double sampled_condition_violation(const NonlinearSpec& spec, double radius = 10.0);

/// Throws HypothesisError when a custom nonlinearity fails the sampled check.
void require_admissible(const NonlinearSpec& spec);

/// Bound on |f'(u)| for |u| <= amplitude; enters the step-size limit.
double nonlinear_stiffness(const NonlinearSpec& spec, double amplitude);

struct State {
  Field u;
  Field v;
  double tau = 0.0;
};

/// External source added to the right-hand side.
class Forcing {
 public:
  virtual ~Forcing() = default;
  /// acc += S(., tau)
  virtual void add_to(Field& acc, double tau) const = 0;
};

/// L_h u - m u - b v + f(u) + S(., tau).
Field acceleration(const State& state, const PhysParams& params, const NonlinearSpec& spec,
                   const Forcing* forcing = nullptr);

/// Stability constant of the 4-stage scheme on the imaginary axis.
inline constexpr double kRk4ImaginaryStability = 2.8;

/// cfl_fraction * 2.8 / sqrt(spectral_bound + m + stiffness).
double stable_dt(double spectral_bound, double m, double cfl_fraction, double stiffness = 0.0);

/// One step of size dt. Throws InputError when dt exceeds dt_max. The
/// returned fields carry updated validity flags.
State step(const State& state, double dt, const PhysParams& params, const NonlinearSpec& spec,
           const Forcing* forcing = nullptr,
           double dt_max = std::numeric_limits<double>::infinity());

}  // namespace hkglab
