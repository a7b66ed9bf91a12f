#pragma once

// Independent reference solutions: the spatially homogeneous scalar ODE,
// exact discrete eigenmodes and manufactured solutions.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hkglab/dynamics.hpp"
#include "hkglab/functionals.hpp"

namespace hkglab {

/// u'' + b u' + m u = kappa |u|^{p-1} u for real u.
struct ScalarProblem {
  double u0 = 0.0;
  double u1 = 0.0;
  double b = 0.0;
  double m = 0.0;
  double kappa = 1.0;
  double p = 2.0;
};

struct ScalarOptions {
  double tol = 1e-10;  ///< per-step error tolerance (absolute + relative)
  double blowup_threshold = 1e8;
  int fit_window = 20;
  /// Times at which the solution is reported exactly (steps are clipped to
  /// land on them). Must be increasing.
  std::vector<double> sample_times;
};

struct ScalarSample {
  double tau, u, udot;
};

struct ScalarTrace {
  std::vector<ScalarSample> steps;    ///< every accepted step, starting at tau = 0
  std::vector<ScalarSample> samples;  ///< values at the requested sample_times reached
  int accepted = 0;
  int rejected = 0;
  bool blowup = false;
  bool aborted = false;  ///< step size underflow
  std::optional<double> blowup_estimate;
};

/// Dormand-Prince 5(4) with embedded error control, blow-up detection at
/// |u| > blowup_threshold and the same tail fit as the PDE driver.
ScalarTrace scalar_solve(const ScalarProblem& problem, double tau_end,
                         const ScalarOptions& options = {});

struct EigenMode {
  Field field;
  double lambda_h = 0.0;  ///< -L_h field = lambda_h field
  double omega_h = 0.0;   ///< sqrt(lambda_h + m)
  double lambda_continuum = 0.0;
};

/// s-independent sine product prod_a sin((N - j) theta_a) with
/// theta = (2k - 1) pi / (2N + 1) on the horizontal axes. These are the exact
/// eigenvectors of D-D+ with zero ghosts (Neumann-like at the low face,
/// Dirichlet at the high ghost). Needs Boundary::dirichlet_periodic_s so that
/// s-differences vanish. k holds 2n one-based mode numbers (x_1..x_n, y_1..y_n).
/// lambda_continuum = sum (theta_a / h_a)^2, the continuum eigenvalue of the
/// sampled sine profile.
EigenMode eigenmode(const BoxGrid& grid, const std::vector<int>& k, double m);

/// Closed-form solution T(tau) * A * bump(xi) made exact by a source term.
/// Catalog: "gaussian_cos" (T = cos tau, the default) and "gaussian_decay"
/// (T = exp(-tau)).
class ManufacturedCase : public Forcing {
 public:
  ManufacturedCase(const std::string& name, const BoxGrid& grid, const PhysParams& params,
                   const NonlinearSpec& spec, double amplitude = 1.0,
                   const BumpSpec& bump = {1.0, 0.0});

  const std::string& name() const { return name_; }
  /// Exact (u, u_tau) at tau.
  State exact(double tau) const;
  /// Exact u_tau_tau at tau.
  Field exact_acceleration(double tau) const;
  void add_to(Field& acc, double tau) const override;

  static std::vector<std::string> catalog();

 private:
  std::string name_;
  PhysParams params_;
  NonlinearSpec spec_;
  Field bump_;
  Field lap_bump_;  // exact sub-Laplacian from the jet

  double T(double tau) const;
  double dT(double tau) const;
  double d2T(double tau) const;
};

std::unique_ptr<ManufacturedCase> manufactured_case(const std::string& name, const BoxGrid& grid,
                                                    const PhysParams& params,
                                                    const NonlinearSpec& spec,
                                                    double amplitude = 1.0,
                                                    const BumpSpec& bump = {1.0, 0.0});

}  // namespace hkglab
