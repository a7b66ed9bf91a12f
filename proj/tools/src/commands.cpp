#include "hkglab_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>

#include "hkglab/oracle.hpp"
#include "hkglab/subop.hpp"
#include "hkglab_cli/report.hpp"

namespace hkglab::cli {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Field scaled(const Field& u, double c) {
  Field out = u;
  for (auto& z : out.values()) z *= c;
  return out;
}

// Finite-speed heuristic: the truncated box should not influence the
// solution before tau_end. Advisory only.
void box_sizing_warning(const RunConfig& cfg, std::vector<std::string>& warnings) {
  const double R = 3.0 * cfg.width;
  const double need_xy = R + cfg.t_end;
  const double need_s = std::abs(cfg.center_s) + R + 4.0 * R * cfg.t_end;
  if (cfg.L_xy < need_xy || cfg.L_s < need_s)
    warnings.push_back("box may be too small for the horizon: want L_xy >= " + fmt("%.3g", need_xy) +
                       " and L_s >= " + fmt("%.3g", need_s) + " (finite-speed heuristic)");
}

}  // namespace

InitialData build_initial(const RunConfig& cfg) {
  if (cfg.init == InitKind::synthetic_cert)
    throw ConfigError("init.kind = synthetic_cert has no field data; use certify");
  const BoxGrid grid = cfg.grid();
  const PhysParams params = cfg.params();
  const NonlinearSpec spec = cfg.spec();
  const BumpSpec bump{cfg.width, cfg.center_s};

  InitialData out;
  Field u0;
  if (cfg.init == InitKind::gaussian && !cfg.amplitude) {
    try {
      PreparedData d = prepare_blowup_data(grid, params, spec, cfg.T0, bump, cfg.velocity_ratio);
      out.amplitude = d.amplitude;
      out.state = State{std::move(d.u0), std::move(d.u1), 0.0};
      out.report = d.report;
      if (out.report.valid) box_sizing_warning(cfg, out.warnings);
      return out;
    } catch (const NumericalError& e) {
      out.warnings.push_back(std::string("automatic amplitude failed (") + e.what() +
                             "); falling back to amplitude 1");
      out.amplitude = 1.0;
    }
  } else {
    out.amplitude = *cfg.amplitude;
  }

  switch (cfg.init) {
    case InitKind::gaussian:
      u0 = sample(grid, bump_function(grid.n(), bump, out.amplitude));
      break;
    case InitKind::constant:
      u0 = Field(grid, out.amplitude);
      break;
    case InitKind::eigenmode:
      u0 = scaled(eigenmode(grid, std::vector<int>(2 * grid.n(), 1), cfg.m).field, out.amplitude);
      break;
    case InitKind::synthetic_cert:
      break;
  }
  Field u1 = scaled(u0, cfg.velocity_ratio);
  out.report = certificate(measure_certificate_inputs(u0, u1, params, spec, cfg.T0));
  out.state = State{std::move(u0), std::move(u1), 0.0};
  if (cfg.init == InitKind::gaussian && out.report.valid) box_sizing_warning(cfg, out.warnings);
  return out;
}

CertificateReport certify(const RunConfig& cfg, std::vector<std::string>* warnings) {
  if (cfg.init == InitKind::synthetic_cert) {
    CertificateInputs in{cfg.b, cfg.m, cfg.p + 1.0, cfg.T0, cfg.cert_norm_u0_sq, cfg.cert_re_u0u1,
                         cfg.cert_E0, cfg.cert_I_u0};
    return certificate(in);
  }
  InitialData d = build_initial(cfg);
  if (warnings) warnings->insert(warnings->end(), d.warnings.begin(), d.warnings.end());
  return d.report;
}

SimulationOutput simulate(const RunConfig& cfg) {
  InitialData init = build_initial(cfg);
  SimulationOutput out;
  out.report = init.report;
  out.warnings = std::move(init.warnings);

  SimulationConfig sc;
  sc.params = cfg.params();
  sc.spec = cfg.spec();
  sc.initial = std::move(init.state);
  sc.cfl_fraction = cfg.cfl_fraction;
  sc.t_end = cfg.t_end;
  sc.output_every = cfg.output_every;
  sc.linf_threshold = cfg.linf_threshold;
  sc.fit_window = cfg.fit_window;
  sc.T0 = cfg.T0;
  sc.config_echo = echo(cfg);
  out.result = run(sc);

  const Trace& tr = out.result.trace;
  if (tr.rows.size() >= 3) out.monitors = trace_monitors(tr, out.report);
  out.csv = trace_csv(tr, out.monitors);
  out.summary = summary_json(tr, out.report, out.monitors);

  if (cfg.svg) {
    Series E{"E", {}, {}}, I{"I", {}, {}}, A{"A", {}, {}}, M{"M", {}, {}}, L{"linf_u", {}, {}};
    for (const auto& r : tr.rows) {
      for (Series* s : {&E, &I, &A, &M, &L}) s->x.push_back(r.tau);
      E.y.push_back(r.E);
      I.y.push_back(r.I);
      A.y.push_back(r.A);
      M.y.push_back(r.M);
      L.y.push_back(r.linf_u);
    }
    for (const Series* s : {&E, &I, &A, &M})
      out.svgs["plot_" + s->name + ".svg"] = svg_plot(*s, "tau", tr.config_echo);
    out.svgs["plot_linf_u.svg"] = svg_plot(L, "tau", tr.config_echo, true);
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << content;
}

// Shared error mapping for commands that read a config.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::config_error;
  } catch (const InputError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::config_error;
  } catch (const HypothesisError& e) {
    err << "hypothesis error: " << e.what() << "\n";
    return exit_code::certificate_invalid;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_code::numerical_abort;
  }
}

}  // namespace

int cmd_simulate(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config);
    SimulationOutput s = simulate(cfg);
    for (const auto& w : s.warnings) err << "warning: " << w << "\n";
    const std::filesystem::path dir = cfg.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output.dir '" + dir.string() + "': " + ec.message());
    write_file(dir / "trace.csv", s.csv);
    write_file(dir / "summary.json", s.summary);
    for (const auto& [name, svg] : s.svgs) write_file(dir / name, svg);
    out << s.summary;
    switch (s.result.trace.status.tag) {
      case RunTag::blowup_detected: return exit_code::blowup;
      case RunTag::nonfinite_abort: return exit_code::numerical_abort;
      default: return exit_code::ok;
    }
  });
}

int cmd_certify(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config);
    std::vector<std::string> warnings;
    const CertificateReport r = certify(cfg, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    out << certificate_json(r) << "\n";
    return r.valid ? exit_code::ok : exit_code::certificate_invalid;
  });
}

// --- convergence ---------------------------------------------------------------

ConvergenceResult convergence_ladder(const std::vector<int>& levels, double kappa) {
  std::set<int> distinct(levels.begin(), levels.end());
  if (distinct.size() < 3) throw ConfigError("convergence needs at least 3 distinct levels");
  if (*distinct.begin() < 4) throw ConfigError("convergence levels must be >= 4");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be >= 0");

  // Box and bump chosen so that 17^3 already resolves the bump.
  constexpr double L = 4.0, width = 1.3, t_end = 0.5;
  const PhysParams params{0.5, 1.0};
  const NonlinearSpec spec = NonlinearSpec::power(2.0, kappa);

  ConvergenceResult res;
  for (int N : distinct) {
    const BoxGrid grid(1, N, N, N, L, L, Boundary::dirichlet);
    const auto mc = manufactured_case("gaussian_cos", grid, params, spec, 1.0, {width, 0.0});
    SimulationConfig sc;
    sc.params = params;
    sc.spec = spec;
    sc.initial = mc->exact(0.0);
    sc.forcing = mc.get();
    sc.t_end = t_end;
    const RunResult r = run(sc);
    const State ex = mc->exact(r.final_state.tau);
    double err = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c)
      err = std::max(err, std::abs(r.final_state.u[c] - ex.u[c]));
    res.levels.push_back({N, grid.h_x(), err});
  }
  for (std::size_t k = 1; k < res.levels.size(); ++k) {
    const auto& a = res.levels[k - 1];
    const auto& b = res.levels[k];
    res.pair_orders.push_back(std::log(a.error / b.error) / std::log(a.h / b.h));
  }
  double xm = 0.0, ym = 0.0;
  for (const auto& l : res.levels) {
    xm += std::log(l.h);
    ym += std::log(l.error);
  }
  xm /= res.levels.size();
  ym /= res.levels.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& l : res.levels) {
    sxx += (std::log(l.h) - xm) * (std::log(l.h) - xm);
    sxy += (std::log(l.h) - xm) * (std::log(l.error) - ym);
  }
  res.order = sxy / sxx;
  return res;
}

int cmd_convergence(const std::vector<int>& levels, double kappa, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    const ConvergenceResult r = convergence_ladder(levels, kappa);
    char buf[160];
    out << "     N            h        error   order\n";
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
      const auto& l = r.levels[k];
      if (k == 0)
        std::snprintf(buf, sizeof buf, "%6d %12.6g %12.6g       -\n", l.N, l.h, l.error);
      else
        std::snprintf(buf, sizeof buf, "%6d %12.6g %12.6g %7.3f\n", l.N, l.h, l.error, r.pair_orders[k - 1]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "observed order %.4f\n", r.order);
    out << buf;
    const bool ok = r.order >= 1.8 && r.order <= 2.2;
    out << (ok ? "PASS" : "FAIL") << " (expected 1.8 <= order <= 2.2)\n";
    return ok ? exit_code::ok : 1;
  });
}

// --- selftest ------------------------------------------------------------------

Mutation mutation_from_string(const std::string& s) {
  if (s.empty() || s == "none") return Mutation::none;
  if (s == "flip-y") return Mutation::flip_y_coupling;
  if (s == "wrong-alpha") return Mutation::wrong_alpha;
  throw ConfigError("unknown mutation '" + s + "'");
}

namespace {

GroupPoint random_point(int n, std::mt19937_64& rng, double r = 1.0) {
  std::uniform_real_distribution<double> d(-r, r);
  GroupPoint p = GroupPoint::zero(n);
  for (auto& v : p.x) v = d(rng);
  for (auto& v : p.y) v = d(rng);
  p.s = d(rng);
  return p;
}

Field random_field(const BoxGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(g);
  for (auto& z : f.values()) z = cplx(d(rng), d(rng));
  return f;
}

CheckResult check_group_axioms() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int n = 1; n <= 2; ++n) {
    for (int t = 0; t < 100; ++t) {
      const GroupPoint a = random_point(n, rng), b = random_point(n, rng), c = random_point(n, rng);
      worst = std::max(worst, max_abs_diff(mul(mul(a, b), c), mul(a, mul(b, c))));
      worst = std::max(worst, max_abs_diff(mul(a, inverse(a)), GroupPoint::zero(n)));
      worst = std::max(worst, max_abs_diff(mul(GroupPoint::zero(n), a), a));
      const double lam = 0.5 + t * 0.01;
      worst = std::max(worst, max_abs_diff(dilate(lam, mul(a, b)), mul(dilate(lam, a), dilate(lam, b))));
    }
  }
  return {"group axioms", worst <= 1e-13, "max defect " + fmt("%.3g", worst)};
}

CheckResult check_commutator(Mutation mut) {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const auto catalog = test_function_catalog(n);
    for (int i = 1; i <= n; ++i) {
      const HorizontalField X = HorizontalField::X(n, i);
      HorizontalField Y = HorizontalField::Y(n, i);
      if (mut == Mutation::flip_y_coupling) Y.coupling = -Y.coupling;
      for (int t = 0; t < 10; ++t) {
        const GroupPoint p = random_point(n, rng);
        for (const TestFunction& f : catalog) {
          const Jet2 j = f.jet(p);
          double scale = 1.0 + std::abs(j.value);
          for (const auto& g : j.grad) scale += std::abs(g);
          for (int a = 0; a < j.dim(); ++a)
            for (int b = 0; b <= a; ++b) scale += std::abs(j.hess(a, b));
          worst = std::max(worst, std::abs(commutator_defect(X, Y, j, p)) / scale);
        }
      }
    }
  }
  return {"commutator [X,Y] = -4 d/ds", worst <= 1e-13, "max scaled defect " + fmt("%.3g", worst)};
}

CheckResult check_sbp() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (Boundary bc : {Boundary::dirichlet, Boundary::periodic, Boundary::dirichlet_periodic_s}) {
    const BoxGrid g(1, 9, 8, 7, 2.0, 3.0, bc);
    const double sb = closed_form_spectral_bound(g);
    for (int t = 0; t < 5; ++t) {
      const Field u = random_field(g, rng);
      const double lhs = std::abs(inner(sublaplacian(u), u) + grad_h_norm_sq(u));
      worst = std::max(worst, lhs / (1.0 + l2_norm_sq(u) * sb));
    }
  }
  return {"summation by parts", worst <= 1e-12, "max scaled defect " + fmt("%.3g", worst)};
}

CheckResult check_power_identity() {
  std::mt19937_64 rng(4);
  const BoxGrid g(1, 6, 6, 6, 1.0, 1.0, Boundary::dirichlet);
  double worst = 0.0;
  for (double p : {2.0, 3.0, 5.0}) {
    const NonlinearSpec spec = NonlinearSpec::power(p, 1.0);
    const Field u = random_field(g, rng);
    for (const cplx z : u.values()) {
      const double lhs = (f_eval(spec, z) * std::conj(z)).real();
      const double rhs = (p + 1.0) * F_eval(spec, z);
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  return {"power identity Re f(u)u* = (p+1)F(u)", worst <= 1e-14, "max rel " + fmt("%.3g", worst)};
}

CertificateInputs random_valid_inputs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  CertificateInputs in;
  in.b = 0.05 + 3.0 * u01(rng);
  in.m = 0.05 + 3.0 * u01(rng);
  in.alpha = 2.0 + 1e-3 + 4.0 * u01(rng);
  in.T0 = 0.1 + 5.0 * u01(rng);
  in.norm_u0_sq = 0.1 + 10.0 * u01(rng);
  in.E0 = -5.0 + 6.0 * u01(rng);
  in.I_u0 = -0.1 - 10.0 * u01(rng);
  const double mu = std::max({in.b, in.m, in.alpha});
  const double thr = in.alpha * (mu + 1.0) * in.E0 / (in.m * (in.alpha - 2.0));
  in.re_u0u1 = std::max(thr, 0.0) + 0.01 + 5.0 * u01(rng);
  return in;
}

CheckResult check_bound_equivalence(Mutation mut) {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  int invalid = 0;
  for (int t = 0; t < 1000; ++t) {
    const CertificateInputs in = random_valid_inputs(rng);
    const CertificateReport r = certificate(in);
    double tm = r.T_star_M;
    if (mut == Mutation::wrong_alpha) {
      CertificateInputs bad = in;
      bad.alpha += 0.25;
      tm = certificate(bad).T_star_M;
    }
    if (!r.valid) ++invalid;
    worst = std::max(worst, std::abs(r.T_star_thm - tm) / std::abs(r.T_star_thm));
  }
  const bool ok = worst <= 1e-12 && invalid == 0;
  return {"bound equivalence T*_thm = T*_M", ok,
          "max rel " + fmt("%.3g", worst) + ", invalid " + std::to_string(invalid)};
}

CheckResult check_worked_example() {
  const CertificateReport r = certificate({1.0, 1.0, 3.0, 2.0, 1.0, 4.0, 0.25, -1.0});
  const bool ok = r.mu == 3.0 && r.omega == 1.75 && r.sigma == 0.1875 &&
                  std::abs(r.T_star_thm - 2.0) <= 1e-15 && std::abs(r.T_star_M - 2.0) <= 1e-15;
  return {"certificate worked example", ok,
          "T*_thm " + fmt("%.17g", r.T_star_thm) + ", T*_M " + fmt("%.17g", r.T_star_M)};
}

CheckResult check_scalar_oracle() {
  const ScalarTrace bl = scalar_solve({6.0, 12.0, 0.0, 0.0, 1.0, 2.0}, 2.0);
  const double est = bl.blowup_estimate.value_or(std::nan(""));
  const double e1 = std::abs(est - 1.0);

  ScalarOptions opt;
  for (int k = 0; k <= 100; ++k) opt.sample_times.push_back(0.1 * k);
  const ScalarTrace osc = scalar_solve({1.0, 0.0, 0.2, 1.0, 0.0, 2.0}, 10.0, opt);
  const double wd = std::sqrt(0.99);
  double e2 = 0.0;
  for (const auto& s : osc.samples) {
    const double exact = std::exp(-0.1 * s.tau) * (std::cos(wd * s.tau) + 0.1 / wd * std::sin(wd * s.tau));
    e2 = std::max(e2, std::abs(s.u - exact));
  }
  const bool ok = e1 <= 1e-4 && e2 <= 1e-8 && osc.samples.size() == 101;
  return {"scalar oracle closed forms", ok,
          "blow-up err " + fmt("%.3g", e1) + ", oscillator err " + fmt("%.3g", e2)};
}

}  // namespace

std::vector<CheckResult> selftest(Mutation mut) {
  return {check_group_axioms(),   check_commutator(mut),         check_sbp(),
          check_power_identity(), check_bound_equivalence(mut),  check_worked_example(),
          check_scalar_oracle()};
}

int cmd_selftest(Mutation mut, std::ostream& out) {
  const auto results = selftest(mut);
  bool all = true;
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%-4s  %-40s  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                  r.detail.c_str());
    out << buf;
    all = all && r.passed;
  }
  return all ? exit_code::ok : 1;
}

}  // namespace hkglab::cli
