#include "hkglab_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>

namespace hkglab::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string commented(const std::string& text, const std::string& prefix) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    out += prefix + text.substr(pos, nl - pos) + "\n";
    pos = nl + 1;
  }
  return out;
}

}  // namespace

std::string trace_csv(const Trace& trace, const std::optional<MonitorSeries>& mon) {
  std::string out = commented(trace.config_echo, "# ");
  out += "step,tau,l2_u_sq,linf_u,l2_v_sq,gradh_sq,F_int,E,I,A,M,diss_residual,eta,Q\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const DiagnosticsRow& r = trace.rows[k];
    const double eta = mon ? mon->rows[k].eta : nan;
    const double Q = mon ? mon->rows[k].Q : nan;
    out += std::to_string(r.step);
    for (double v : {r.tau, r.l2_u_sq, r.linf_u, r.l2_v_sq, r.gradh_sq, r.F_int, r.E, r.I, r.A, r.M,
                     r.diss_residual, eta, Q})
      out += "," + num(v);
    out += "\n";
  }
  return out;
}

double energy_drift_rel(const Trace& trace) {
  if (trace.rows.empty()) return 0.0;
  double worst = 0.0;
  for (const auto& r : trace.rows) worst = std::max(worst, std::abs(r.diss_residual));
  const double e0 = std::abs(trace.rows.front().E);
  return e0 > 0.0 ? worst / e0 : worst;
}

std::string summary_json(const Trace& trace, const CertificateReport& c,
                         const std::optional<MonitorSeries>& mon) {
  json j;
  j["status"] = to_string(trace.status.tag);
  j["tau_stop"] = jnum(trace.status.tau_stop);
  j["blowup_estimate"] = trace.status.blowup_estimate ? jnum(*trace.status.blowup_estimate) : json(nullptr);
  j["certificate"] = {{"valid", c.valid},
                      {"mu", jnum(c.mu)},
                      {"omega", jnum(c.omega)},
                      {"sigma", jnum(c.sigma)},
                      {"T_star_thm", jnum(c.T_star_thm)},
                      {"T_star_M", jnum(c.T_star_M)},
                      {"I_u0", jnum(c.in.I_u0)},
                      {"E0", jnum(c.in.E0)},
                      {"corr", jnum(c.in.re_u0u1)},
                      {"corr_threshold", jnum(c.corr_threshold)}};
  j["energy_drift_rel"] = jnum(energy_drift_rel(trace));
  if (mon) {
    j["monitors"] = {{"A_identity_maxrelerr", jnum(mon->A_identity_maxrelerr)},
                     {"I_negative_throughout", mon->I_negative_throughout},
                     {"eta_min", jnum(mon->eta_min)},
                     {"Q_min", jnum(mon->Q_min)}};
  } else {
    j["monitors"] = {{"A_identity_maxrelerr", nullptr},
                     {"I_negative_throughout", nullptr},
                     {"eta_min", nullptr},
                     {"Q_min", nullptr}};
  }
  j["config"] = trace.config_echo;
  return j.dump(2) + "\n";
}

std::string svg_plot(const Series& s, const std::string& x_label, const std::string& echo,
                     bool log_y) {
  constexpr double W = 640, H = 400, ml = 70, mr = 20, mt = 30, mb = 50;
  std::vector<double> ys(s.y.size());
  for (std::size_t i = 0; i < s.y.size(); ++i)
    ys[i] = log_y ? (s.y[i] > 0.0 ? std::log10(s.y[i]) : std::numeric_limits<double>::quiet_NaN()) : s.y[i];

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (!std::isfinite(s.x[i]) || !std::isfinite(ys[i])) continue;
    x0 = std::min(x0, s.x[i]);
    x1 = std::max(x1, s.x[i]);
    y0 = std::min(y0, ys[i]);
    y1 = std::max(y1, ys[i]);
  }
  const bool empty = !(x0 <= x1);
  if (empty) x0 = y0 = 0.0, x1 = y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  std::string safe = echo;
  for (std::size_t p = safe.find("--"); p != std::string::npos; p = safe.find("--")) safe.replace(p, 2, "- -");
  out += "<!--\n" + safe + "-->\n";
  out += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(W - ml - mr) + "\" height=\"" +
         num(H - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string yname = log_y ? "log10 " + s.name : s.name;
  out += "<text x=\"320\" y=\"20\" text-anchor=\"middle\">" + yname + " vs " + x_label + "</text>\n";
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.4g</text>\n<text x=\"%g\" y=\"%g\" "
                "font-size=\"11\">%.4g</text>\n",
                4.0, py(y1) + 4, y1, 4.0, py(y0) + 4, y0);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.4g</text>\n<text x=\"%g\" y=\"%g\" "
                "font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                ml, H - mb + 16, x0, W - mr, H - mb + 16, x1);
  out += buf;

  std::string pts;
  auto flush = [&] {
    if (!pts.empty()) out += "<polyline fill=\"none\" stroke=\"steelblue\" points=\"" + pts + "\"/>\n";
    pts.clear();
  };
  for (std::size_t i = 0; i < s.x.size() && !empty; ++i) {
    if (!std::isfinite(s.x[i]) || !std::isfinite(ys[i])) {
      flush();
      continue;
    }
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(ys[i]));
    pts += buf;
  }
  flush();
  out += "</svg>\n";
  return out;
}

}  // namespace hkglab::cli
