#pragma once

// Output artifacts: trace CSV, summary JSON and SVG line plots.

#include <optional>
#include <string>
#include <vector>

#include "hkglab/functionals.hpp"

namespace hkglab::cli {

/// Columns: step, tau, l2_u_sq, linf_u, l2_v_sq, gradh_sq, F_int, E, I, A, M,
/// diss_residual, eta, Q. Numbers use %.17g; the config echo comes first as
/// `# ` lines. eta and Q come from the monitors (nan where unavailable).
std::string trace_csv(const Trace& trace, const std::optional<MonitorSeries>& monitors);

/// max |R(tau)| / |E(0)| over the trace (max |R| when E(0) = 0).
double energy_drift_rel(const Trace& trace);

std::string summary_json(const Trace& trace, const CertificateReport& cert,
                         const std::optional<MonitorSeries>& monitors);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Single polyline chart. Non-finite points break the line.
std::string svg_plot(const Series& s, const std::string& x_label, const std::string& echo,
                     bool log_y = false);

}  // namespace hkglab::cli
