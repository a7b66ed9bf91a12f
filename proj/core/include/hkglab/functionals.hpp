#pragma once

// Scalar functionals along a trajectory and the blow-up certificate.
//
//   E(u, v) = 1/2 |v|^2 + m/2 |u|^2 + 1/2 |grad_H u|^2 - int F(u)
//   I(u)    = m |u|^2 + |grad_H u|^2 - Re <f(u), u>
//   A       = 2 Re <u, v> + b |u|^2
//   M(tau)  = |u|^2 + b int_0^tau |u|^2 + b (T0 - tau) |u_0|^2
//
// Time integrals use the trapezoid rule on the recorded output grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hkglab/dynamics.hpp"

namespace hkglab {

struct DiagnosticsRow {
  std::int64_t step = 0;
  double tau = 0.0;
  double l2_u_sq = 0.0;
  double l2_v_sq = 0.0;
  double gradh_sq = 0.0;
  double linf_u = 0.0;
  double F_int = 0.0;
  double re_fu_u = 0.0;  ///< Re <f(u), u>
  double re_uv = 0.0;    ///< Re <u, v>
  double E = 0.0;
  double I = 0.0;
  double A = 0.0;
  double b_int_v_sq = 0.0;  ///< b int_0^tau |v|^2 (trapezoid)
  double b_int_u_sq = 0.0;  ///< b int_0^tau |u|^2 (trapezoid)
  double diss_residual = 0.0;
  double M = 0.0;  ///< NaN when T0 is unset or tau > T0
};

enum class RunTag { running, completed, blowup_detected, nonfinite_abort };
std::string to_string(RunTag tag);

struct RunStatus {
  RunTag tag = RunTag::running;
  double tau_stop = 0.0;
  std::optional<double> blowup_estimate;
};

struct Trace {
  std::string config_echo;
  PhysParams params;
  std::optional<double> T0;
  std::vector<DiagnosticsRow> rows;
  RunStatus status;

  const DiagnosticsRow& front() const { return rows.front(); }
};

/// Pieces needed to assemble a row from a state.
struct StateMeasures {
  double l2_u_sq, l2_v_sq, gradh_sq, linf_u, F_int, re_fu_u, re_uv;
};
StateMeasures measure(const State& s, const NonlinearSpec& spec);

/// Appends rows to a trace, carrying the trapezoid integrals forward.
class TraceBuilder {
 public:
  TraceBuilder(Trace& trace, const PhysParams& params, const NonlinearSpec& spec,
               std::optional<double> T0);
  const DiagnosticsRow& append(const State& s, std::int64_t step);

 private:
  Trace& trace_;
  PhysParams params_;
  const NonlinearSpec& spec_;
  std::optional<double> T0_;
};

double energy(const Field& u, const Field& v, const PhysParams& params, const NonlinearSpec& spec);
/// E from stored pieces; F_int already includes the cell volume.
double energy_from_parts(double l2_v_sq, double l2_u_sq, double gradh_sq, double F_int, double m);
double nehari(const Field& u, const PhysParams& params, const NonlinearSpec& spec);
double aux_A(const Field& u, const Field& v, const PhysParams& params);

/// M(tau) from the trace; off-trace tau interpolates linearly between rows.
double aux_M(const Trace& trace, double tau, double T0);
/// E(tau) + b int_0^tau |v|^2 - E(0) at a recorded tau.
double dissipation_residual(const Trace& trace, double tau);

struct CertificateInputs {
  double b = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  double T0 = 0.0;
  double norm_u0_sq = 0.0;
  double re_u0u1 = 0.0;
  double E0 = 0.0;
  double I_u0 = 0.0;
};

struct CertificateReport {
  CertificateInputs in;
  double mu = 0.0;
  double omega = 0.0;
  double sigma = 0.0;
  double corr_threshold = 0.0;
  bool params_positive = false;  ///< b > 0 and m > 0
  bool alpha_ok = false;         ///< alpha > 2
  bool nehari_negative = false;  ///< I(u0) < 0
  bool correlation_ok = false;   ///< Re <u0,u1> >= corr_threshold
  double T_star_thm = 0.0;       ///< NaN when Re <u0,u1> <= 0
  double T_star_M = 0.0;         ///< M(0) / (sigma M'(0)), NaN likewise
  bool valid = false;
};

/// mu = max{b, m, alpha}; omega = alpha - 1 - m (alpha - 2) / (mu + 1);
/// sigma = (omega - 1) / 4. Throws HypothesisError when alpha <= 2.
CertificateReport certificate(const CertificateInputs& in);

/// Flat JSON object with the keys valid, mu, omega, sigma, T_star_thm,
/// T_star_M, I_u0, E0, corr, corr_threshold, b, m, alpha, T0, norm_u0_sq,
/// params_positive, alpha_ok, nehari_negative, correlation_ok. Undefined
/// bounds are written as null.
std::string certificate_json(const CertificateReport& r, int indent = 2);

struct MonitorRow {
  double tau = 0.0;
  double dA_fd = 0.0;        ///< centered difference of A
  double dA_identity = 0.0;  ///< 2 |v|^2 - 2 I(u)
  double A_relerr = 0.0;
  bool I_negative = false;
  bool A_above = false;  ///< A > 2 alpha (mu+1) E(0) / (m (alpha-2))
  double eta = 0.0;
  double Q = 0.0;  ///< M'' M - (omega+3)/4 (M')^2; NaN where undefined
};

struct MonitorSeries {
  std::vector<MonitorRow> rows;
  double A_threshold = 0.0;
  /// Largest A_relerr over rows with tau in [0.25, 0.75] tau_last.
  double A_identity_maxrelerr = 0.0;
  bool I_negative_throughout = false;
  bool A_above_throughout = false;
  double eta_min = 0.0;
  double Q_min = 0.0;  ///< over rows where Q is defined
};

/// Requires at least three rows. Derivatives at the two end rows use
/// one-sided values only where noted (A', M', M'' are NaN there).
MonitorSeries trace_monitors(const Trace& trace, const CertificateReport& report);

struct BumpSpec {
  double width = 1.5;
  double center_s = 0.0;
};

struct PreparedData {
  Field u0;
  Field u1;
  double amplitude = 0.0;
  CertificateReport report;
};

/// u0 = lambda * bump, u1 = c * u0, scanning lambda upward geometrically
/// until I(u0) < 0 and the correlation condition holds.
/// Throws InputError for c <= 0 or a non-power nonlinearity and
/// NumericalError when lambda exceeds 1e6.
PreparedData prepare_blowup_data(const BoxGrid& grid, const PhysParams& params,
                                 const NonlinearSpec& spec, double T0, const BumpSpec& bump,
                                 double velocity_ratio);

/// Gaussian bump exp(-(|x|^2 + |y|^2 + (s - center_s)^2) / width^2).
TestFunction bump_function(int n, const BumpSpec& bump, double amplitude = 1.0);

/// Certificate inputs measured from Cauchy data.
CertificateInputs measure_certificate_inputs(const Field& u0, const Field& u1,
                                             const PhysParams& params, const NonlinearSpec& spec,
                                             double T0);

}  // namespace hkglab
