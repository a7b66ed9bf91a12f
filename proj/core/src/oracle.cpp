#include "hkglab/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hkglab/run.hpp"

namespace hkglab {

// --- scalar ODE --------------------------------------------------------------

namespace {

using Vec2 = std::array<double, 2>;

Vec2 rhs(const ScalarProblem& pr, const Vec2& y) {
  const double u = y[0];
  const double f = u == 0.0 ? 0.0 : pr.kappa * std::pow(std::abs(u), pr.p - 1.0) * u;
  return {y[1], -pr.b * y[1] - pr.m * u + f};
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct DpStep {
  Vec2 y;
  double err;  // scaled, accept when <= 1
};

DpStep dp_step(const ScalarProblem& pr, const Vec2& y, double h, double tol) {
  auto comb = [&](std::initializer_list<std::pair<double, const Vec2*>> terms) {
    Vec2 out = y;
    for (auto [w, k] : terms)
      for (int i = 0; i < 2; ++i) out[i] += h * w * (*k)[i];
    return out;
  };
  const Vec2 k1 = rhs(pr, y);
  const Vec2 k2 = rhs(pr, comb({{a21, &k1}}));
  const Vec2 k3 = rhs(pr, comb({{a31, &k1}, {a32, &k2}}));
  const Vec2 k4 = rhs(pr, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vec2 k5 = rhs(pr, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vec2 k6 = rhs(pr, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const Vec2 y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const Vec2 k7 = rhs(pr, y5);
  double err = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
    err = std::max(err, std::abs(e) / scale);
  }
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  return {y5, err};
}

}  // namespace

ScalarTrace scalar_solve(const ScalarProblem& pr, double tau_end, const ScalarOptions& opt) {
  if (!std::isfinite(pr.u0) || !std::isfinite(pr.u1) || !std::isfinite(pr.b) ||
      !std::isfinite(pr.m) || !std::isfinite(pr.kappa) || !(pr.p > 1.0) || !std::isfinite(tau_end))
    throw InputError("scalar problem needs finite inputs and p > 1");
  if (!std::is_sorted(opt.sample_times.begin(), opt.sample_times.end()))
    throw InputError("sample times must be increasing");

  ScalarTrace tr;
  Vec2 y{pr.u0, pr.u1};
  double t = 0.0;
  tr.steps.push_back({t, y[0], y[1]});
  std::size_t next_sample = 0;
  while (next_sample < opt.sample_times.size() && opt.sample_times[next_sample] <= 0.0) {
    if (opt.sample_times[next_sample] == 0.0) tr.samples.push_back({0.0, y[0], y[1]});
    ++next_sample;
  }

  double h = std::min(1e-3, std::max(tau_end, 1e-12));
  while (t < tau_end) {
    double target = tau_end;
    if (next_sample < opt.sample_times.size()) target = std::min(target, opt.sample_times[next_sample]);
    const bool clip = t + h >= target;
    const double hh = clip ? target - t : h;
    if (hh < 1e-15 * std::max(1.0, std::abs(t))) {
      tr.aborted = true;
      break;
    }
    const DpStep s = dp_step(pr, y, hh, opt.tol);
    if (s.err <= 1.0) {
      y = s.y;
      t = clip ? target : t + hh;
      ++tr.accepted;
      tr.steps.push_back({t, y[0], y[1]});
      if (clip && next_sample < opt.sample_times.size() && t == opt.sample_times[next_sample]) {
        tr.samples.push_back({t, y[0], y[1]});
        ++next_sample;
      }
      if (std::abs(y[0]) > opt.blowup_threshold) {
        tr.blowup = true;
        const std::size_t count =
            std::min<std::size_t>(tr.steps.size(), static_cast<std::size_t>(opt.fit_window));
        std::vector<double> ts, us;
        for (std::size_t i = tr.steps.size() - count; i < tr.steps.size(); ++i) {
          ts.push_back(tr.steps[i].tau);
          us.push_back(std::abs(tr.steps[i].u));
        }
        tr.blowup_estimate = estimate_blowup_time(ts, us, pr.p, opt.fit_window);
        break;
      }
    } else {
      ++tr.rejected;
    }
    const double fac = s.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(s.err, -0.2), 0.2, 5.0);
    // A clipped step says nothing about the natural step length unless rejected.
    if (!(clip && s.err <= 1.0)) h = hh * fac;
  }
  return tr;
}

// --- eigenmodes ----------------------------------------------------------------

EigenMode eigenmode(const BoxGrid& grid, const std::vector<int>& k, double m) {
  if (grid.bc() != Boundary::dirichlet_periodic_s)
    throw InputError("eigenmodes need Dirichlet horizontal axes and a periodic s axis");
  const int n = grid.n();
  if (static_cast<int>(k.size()) != 2 * n) throw InputError("eigenmode needs 2n mode numbers");
  for (int a = 0; a < 2 * n; ++a)
    if (k[a] < 1 || k[a] > grid.points(a)) throw InputError("mode index out of range");

  // D-D+ with zero ghosts on both sides closes the low end like a Neumann
  // condition at the cell face and the high end like Dirichlet at the ghost,
  // so the modes are sines anchored at the upper ghost.
  std::vector<double> theta(2 * n);
  for (int a = 0; a < 2 * n; ++a)
    theta[a] = (2 * k[a] - 1) * std::numbers::pi / (2 * grid.points(a) + 1);

  EigenMode mode;
  mode.field = Field(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    double v = 1.0;
    for (int a = 0; a < 2 * n; ++a)
      v *= std::sin((grid.points(a) - grid.axis_index(c, a)) * theta[a]);
    mode.field[c] = v;
  }
  for (int a = 0; a < 2 * n; ++a) {
    const double h = grid.spacing(a);
    const double sn = std::sin(theta[a] / 2.0);
    mode.lambda_h += 4.0 / (h * h) * sn * sn;
    mode.lambda_continuum += (theta[a] / h) * (theta[a] / h);
  }
  mode.omega_h = std::sqrt(mode.lambda_h + m);
  return mode;
}

// --- manufactured solutions --------------------------------------------------

std::vector<std::string> ManufacturedCase::catalog() { return {"gaussian_cos", "gaussian_decay"}; }

ManufacturedCase::ManufacturedCase(const std::string& name, const BoxGrid& grid,
                                   const PhysParams& params, const NonlinearSpec& spec,
                                   double amplitude, const BumpSpec& bump)
    : name_(name), params_(params), spec_(spec) {
  const auto cat = catalog();
  if (std::find(cat.begin(), cat.end(), name) == cat.end())
    throw InputError("unknown manufactured case '" + name + "'");
  const TestFunction f = bump_function(grid.n(), bump, amplitude);
  bump_ = Field(grid);
  lap_bump_ = Field(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const GroupPoint p = grid.coordinates(c);
    const Jet2 j = f.jet(p);
    bump_[c] = j.value;
    lap_bump_[c] = apply_sublaplacian_exact(j, p);
  }
}

double ManufacturedCase::T(double tau) const {
  return name_ == "gaussian_cos" ? std::cos(tau) : std::exp(-tau);
}
double ManufacturedCase::dT(double tau) const {
  return name_ == "gaussian_cos" ? -std::sin(tau) : -std::exp(-tau);
}
double ManufacturedCase::d2T(double tau) const {
  return name_ == "gaussian_cos" ? -std::cos(tau) : std::exp(-tau);
}

State ManufacturedCase::exact(double tau) const {
  State s{bump_, bump_, tau};
  const double a = T(tau), b = dT(tau);
  for (auto& z : s.u.values()) z *= a;
  for (auto& z : s.v.values()) z *= b;
  return s;
}

Field ManufacturedCase::exact_acceleration(double tau) const {
  Field out = bump_;
  const double a = d2T(tau);
  for (auto& z : out.values()) z *= a;
  return out;
}

void ManufacturedCase::add_to(Field& acc, double tau) const {
  require_same_grid(acc, bump_);
  const double t = T(tau);
  const double lin = d2T(tau) + params_.b * dT(tau) + params_.m * t;
  auto a = acc.values();
  for (std::size_t c = 0; c < a.size(); ++c)
    a[c] += bump_[c] * lin - t * lap_bump_[c] - f_eval(spec_, t * bump_[c]);
}

std::unique_ptr<ManufacturedCase> manufactured_case(const std::string& name, const BoxGrid& grid,
                                                    const PhysParams& params,
                                                    const NonlinearSpec& spec, double amplitude,
                                                    const BumpSpec& bump) {
  return std::make_unique<ManufacturedCase>(name, grid, params, spec, amplitude, bump);
}

}  // namespace hkglab
