#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hkglab/oracle.hpp"
#include "hkglab/run.hpp"
#include "hkglab/subop.hpp"
#include "support.hpp"

using namespace hkglab;

TEST_SUITE("dynamics") {

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(PhysParams{0.0, 0.0}.validate());
  CHECK_THROWS_AS((PhysParams{-1.0, 1.0}.validate()), InputError);
  CHECK_THROWS_AS((PhysParams{1.0, std::nan("")}.validate()), InputError);
  CHECK((PhysParams{1.0, 1.0}.theorem_mode()));
  CHECK_FALSE((PhysParams{0.0, 1.0}.theorem_mode()));
  CHECK_THROWS_AS(NonlinearSpec::power(1.0, 1.0), InputError);
  CHECK_THROWS_AS(NonlinearSpec::power(2.0, -1.0), InputError);
  CHECK(NonlinearSpec::power(3.0, 1.0).alpha() == 4.0);
}

TEST_CASE("power nonlinearity examples") {
  const auto s3 = NonlinearSpec::power(3.0, 1.0);
  CHECK(f_eval(s3, 0.0) == cplx(0.0));
  CHECK(F_eval(s3, 0.0) == 0.0);
  CHECK(f_eval(s3, 2.0) == cplx(8.0));
  CHECK(F_eval(s3, 2.0) == 4.0);
  const cplx i(0.0, 1.0);
  CHECK(std::abs(f_eval(s3, i) - i) <= 1e-15);
  CHECK((f_eval(s3, i) * std::conj(i)).real() == doctest::Approx(1.0));
  CHECK(4.0 * F_eval(s3, i) == doctest::Approx(1.0));
}

TEST_CASE("power identity holds cellwise") {
  std::mt19937_64 rng(41);
  const BoxGrid g(1, 8, 8, 8, 1.0, 1.0, Boundary::dirichlet);
  for (double p : {2.0, 3.0, 5.0, 2.5}) {
    const auto spec = NonlinearSpec::power(p, 0.7);
    const Field u = testing::random_field(g, rng, 3.0);
    for (const cplx z : u.values()) {
      const double lhs = (f_eval(spec, z) * std::conj(z)).real();
      CHECK(std::abs(lhs - (p + 1.0) * F_eval(spec, z)) <= 1e-14 * (1.0 + std::abs(lhs)));
    }
    CHECK(sampled_condition_violation(spec) <= 1e-14);
  }
}

TEST_CASE("F is a potential for f along every direction") {
  // d/de F(u + e w) at e = 0 equals Re[f(u) conj(w)]; central differences
  // must converge at second order.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (double p : {2.0, 3.0, 5.0}) {
    const auto spec = NonlinearSpec::power(p, 1.0);
    for (int t = 0; t < 20; ++t) {
      const cplx u(d(rng), d(rng)), w(d(rng), d(rng));
      const double exact = (f_eval(spec, u) * std::conj(w)).real();
      auto fd = [&](double e) { return (F_eval(spec, u + e * w) - F_eval(spec, u - e * w)) / (2.0 * e); };
      const double e1 = std::abs(fd(2e-3) - exact), e2 = std::abs(fd(1e-3) - exact);
      CHECK(e2 <= 1e-4 * (1.0 + std::abs(exact)));
      if (e1 > 1e-8) CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
    }
  }
}

TEST_CASE("custom nonlinearities") {
  // g(r) = r^4 / 4 written by hand, alpha = 4
  const auto good = NonlinearSpec::custom([](cplx z) { return std::norm(z) * z; },
                                          [](cplx z) { return std::norm(z) * std::norm(z) / 4.0; }, 4.0);
  CHECK_NOTHROW(require_admissible(good));
  CHECK(f_eval(good, 2.0) == cplx(8.0));

  const auto bad_alpha = NonlinearSpec::custom([](cplx z) { return std::norm(z) * z; },
                                               [](cplx z) { return std::norm(z) * std::norm(z) / 4.0; }, 5.0);
  CHECK_THROWS_AS(require_admissible(bad_alpha), HypothesisError);

  const auto shifted = NonlinearSpec::custom([](cplx z) { return z + 1.0; }, [](cplx) { return 0.0; }, 3.0);
  CHECK_THROWS_AS(require_admissible(shifted), HypothesisError);

  const auto blows = NonlinearSpec::custom([](cplx z) { return std::abs(z) > 5.0 ? cplx(INFINITY) : z * 0.0; },
                                           [](cplx) { return 0.0; }, 3.0);
  CHECK_THROWS_AS(f_eval(blows, 6.0), NumericalError);
  CHECK_THROWS_AS(NonlinearSpec::custom(nullptr, nullptr, 3.0), InputError);
}

TEST_CASE("acceleration examples") {
  const auto spec = NonlinearSpec::power(2.0, 1.0);
  const BoxGrid g(1, 6, 6, 6, 1.0, 1.0, Boundary::periodic);
  const Field zero(g);
  CHECK(linf_norm(acceleration(State{zero, zero, 0.0}, {1.0, 1.0}, spec)) == 0.0);
  const double c = 1.7;
  const Field a = acceleration(State{Field(g, c), zero, 0.0}, {1.0, 1.0}, spec);
  for (const auto& z : a.values()) CHECK(z.real() == doctest::Approx(c * c - c).epsilon(1e-15));
}

TEST_CASE("step contracts") {
  const auto spec = NonlinearSpec::power(2.0, 1.0);
  const BoxGrid g(1, 6, 6, 6, 1.0, 1.0, Boundary::dirichlet);
  const State z{Field(g), Field(g), 0.0};
  const State s = step(z, 0.01, {1.0, 1.0}, spec);
  CHECK(linf_norm(s.u) == 0.0);
  CHECK(linf_norm(s.v) == 0.0);
  CHECK(s.tau == 0.01);
  CHECK_THROWS_AS(step(z, 0.0, {1.0, 1.0}, spec), InputError);
  CHECK_THROWS_AS(step(z, 0.2, {1.0, 1.0}, spec, nullptr, 0.1), InputError);
  CHECK(stable_dt(100.0, 21.0, 0.5, 0.0) == doctest::Approx(0.5 * 2.8 / 11.0));
  CHECK(std::isinf(stable_dt(0.0, 0.0, 0.5)));
}

TEST_CASE("eigenmode oscillates at the discrete frequency with fourth-order phase error") {
  const BoxGrid g(1, 12, 10, 6, 2.0, 1.0, Boundary::dirichlet_periodic_s);
  const PhysParams pp{0.0, 1.0};
  const auto spec = NonlinearSpec::power(2.0, 0.0);
  const EigenMode mode = eigenmode(g, {2, 1}, pp.m);
  const double T = 1.0;
  std::vector<double> errs;
  for (int steps : {40, 80}) {
    State s{mode.field, Field(g), 0.0};
    const double dt = T / steps;
    for (int k = 0; k < steps; ++k) s = step(s, dt, pp, spec);
    double e = 0.0;
    const double c = std::cos(mode.omega_h * T);
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s.u[i] - c * mode.field[i]));
    errs.push_back(e);
  }
  CHECK(errs[1] < 1e-5);
  CHECK(std::log2(errs[0] / errs[1]) >= 3.7);
}

TEST_CASE("homogeneous data follows the scalar ODE") {
  const BoxGrid g(1, 6, 6, 6, 2.0, 2.0, Boundary::periodic);
  SimulationConfig cfg;
  cfg.params = {0.3, 1.0};
  cfg.spec = NonlinearSpec::power(2.0, 1.0);
  cfg.initial = State{Field(g, 0.5), Field(g, 0.2), 0.0};
  cfg.t_end = 1.0;
  const RunResult r = run(cfg);
  CHECK(r.trace.status.tag == RunTag::completed);
  ScalarOptions opt;
  for (const auto& row : r.trace.rows) opt.sample_times.push_back(row.tau);
  const ScalarTrace st = scalar_solve({0.5, 0.2, 0.3, 1.0, 1.0, 2.0}, 1.0, opt);
  REQUIRE(st.samples.size() == r.trace.rows.size());
  for (std::size_t k = 0; k < st.samples.size(); ++k)
    CHECK(std::abs(r.trace.rows[k].linf_u - std::abs(st.samples[k].u)) <= 1e-8 * std::abs(st.samples[k].u));
}

TEST_CASE("run bookkeeping") {
  const BoxGrid g(1, 8, 8, 8, 2.0, 2.0, Boundary::dirichlet);
  const Field u0 = sample(g, bump_function(1, {0.8, 0.0}, 1.0));
  SimulationConfig cfg;
  cfg.params = {0.0, 1.0};
  cfg.spec = NonlinearSpec::power(2.0, 0.0);
  cfg.initial = State{u0, Field(g), 0.0};

  cfg.t_end = 0.0;
  const RunResult empty = run(cfg);
  CHECK(empty.trace.rows.empty());
  CHECK(empty.trace.status.tag == RunTag::completed);

  cfg.t_end = 0.5;
  cfg.output_every = 3;
  const RunResult r = run(cfg);
  CHECK(r.trace.status.tag == RunTag::completed);
  CHECK(r.trace.rows.front().tau == 0.0);
  CHECK(r.trace.rows.back().tau == 0.5);
  for (std::size_t k = 1; k + 1 < r.trace.rows.size(); ++k) CHECK(r.trace.rows[k].step % 3 == 0);
  for (std::size_t k = 1; k < r.trace.rows.size(); ++k) CHECK(r.trace.rows[k].tau > r.trace.rows[k - 1].tau);
  CHECK(r.halvings == 0);

  // bit-identical reruns
  const RunResult again = run(cfg);
  REQUIRE(again.trace.rows.size() == r.trace.rows.size());
  for (std::size_t k = 0; k < r.trace.rows.size(); ++k)
    CHECK(std::memcmp(&again.trace.rows[k], &r.trace.rows[k], sizeof(DiagnosticsRow)) == 0);

  cfg.cfl_fraction = 1.5;
  CHECK_THROWS_AS(run(cfg), InputError);
  cfg.cfl_fraction = 0.5;
  cfg.fit_window = 3;
  CHECK_THROWS_AS(run(cfg), InputError);
}

TEST_CASE("energy drift of resolved and unresolved data") {
  const PhysParams pp{0.0, 1.0};
  const auto lin = NonlinearSpec::power(2.0, 0.0);
  auto drift = [&](const State& s0, double cfl) {
    SimulationConfig cfg;
    cfg.params = pp;
    cfg.spec = lin;
    cfg.initial = s0;
    cfg.t_end = 1.0;
    cfg.cfl_fraction = cfl;
    const RunResult r = run(cfg);
    double w = 0.0;
    for (const auto& row : r.trace.rows) w = std::max(w, std::abs(row.diss_residual));
    return w / std::abs(r.trace.rows.front().E);
  };
  const BoxGrid ge(1, 17, 17, 17, 4.0, 4.0, Boundary::dirichlet_periodic_s);
  const Field m = eigenmode(ge, {1, 1}, pp.m).field;
  Field mv = m;
  for (auto& z : mv.values()) z *= 0.5;
  CHECK(drift(State{m, mv, 0.0}, 0.5) <= 1e-8);

  // s-dependent data: RK4 dissipation dominates, and halving dt cuts it by
  // roughly 2^5.
  const BoxGrid g(1, 17, 17, 17, 4.0, 4.0, Boundary::dirichlet);
  const Field u = sample(g, bump_function(1, {1.3, 0.0}, 1.0));
  Field v = u;
  for (auto& z : v.values()) z *= 0.5;
  const double d1 = drift(State{u, v, 0.0}, 0.5), d2 = drift(State{u, v, 0.0}, 0.25);
  MESSAGE("gaussian drift " << d1 << " -> " << d2);
  CHECK(std::log2(d1 / d2) >= 4.0);
}

TEST_CASE("blow-up time estimate") {
  const double T = 1.0;
  std::vector<double> tau, linf;
  for (int k = 0; k < 30; ++k) {
    const double t = 0.5 + 0.015 * k;
    tau.push_back(t);
    linf.push_back(6.0 / ((T - t) * (T - t)));
  }
  const auto exact = estimate_blowup_time(tau, linf, 2.0);
  REQUIRE(exact);
  CHECK(std::abs(*exact - T) <= 1e-6);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<double> noisy = linf;
  for (auto& v : noisy) v *= 1.0 + noise(rng);
  // strictly increasing tail is required, which this profile keeps
  const auto est = estimate_blowup_time(tau, noisy, 2.0);
  REQUIRE(est);
  CHECK(std::abs(*est - T) <= 0.02 * T);

  CHECK_FALSE(estimate_blowup_time(tau, std::vector<double>(tau.size(), 3.0), 2.0));
  CHECK_FALSE(estimate_blowup_time(std::vector<double>(tau.begin(), tau.begin() + 5),
                                   std::vector<double>(linf.begin(), linf.begin() + 5), 2.0));
  CHECK_THROWS_AS(estimate_blowup_time(tau, std::vector<double>(3), 2.0), InputError);
}

TEST_CASE("overflow ends in a numerical abort") {
  const BoxGrid g(1, 4, 4, 4, 1.0, 1.0, Boundary::periodic);
  SimulationConfig cfg;
  cfg.params = {1.0, 1.0};
  cfg.spec = NonlinearSpec::power(5.0, 1.0);
  cfg.initial = State{Field(g, 1e80), Field(g), 0.0};
  cfg.linf_threshold = 1e300;
  cfg.max_halvings = 0;
  const RunResult r = run(cfg);
  CHECK(r.trace.status.tag == RunTag::nonfinite_abort);
}

TEST_CASE("blow-up is detected on homogeneous data") {
  const BoxGrid g(1, 4, 4, 4, 1.0, 1.0, Boundary::periodic);
  SimulationConfig cfg;
  cfg.params = {0.0, 0.0};
  cfg.spec = NonlinearSpec::power(2.0, 1.0);
  cfg.initial = State{Field(g, 6.0), Field(g, 12.0), 0.0};
  cfg.t_end = 2.0;
  const RunResult r = run(cfg);
  CHECK(r.trace.status.tag == RunTag::blowup_detected);
  REQUIRE(r.trace.status.blowup_estimate);
  CHECK(*r.trace.status.blowup_estimate == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.trace.rows.back().linf_u >= 1e6);
}

}  // TEST_SUITE
