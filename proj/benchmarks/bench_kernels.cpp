#include <benchmark/benchmark.h>

#include "hkglab/dynamics.hpp"
#include "hkglab/functionals.hpp"
#include "hkglab/oracle.hpp"
#include "hkglab/subop.hpp"

using namespace hkglab;

namespace {

BoxGrid cube(int N) { return BoxGrid(1, N, N, N, 6.0, 12.0, Boundary::dirichlet); }

Field bump(const BoxGrid& g) { return sample(g, bump_function(1, {1.5, 0.0}, 1.0)); }

void BM_XForward(benchmark::State& st) {
  const BoxGrid g = cube(static_cast<int>(st.range(0)));
  const Field u = bump(g);
  for (auto _ : st) benchmark::DoNotOptimize(x_forward(1, u));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_SubLaplacian(benchmark::State& st) {
  const BoxGrid g = cube(static_cast<int>(st.range(0)));
  const Field u = bump(g);
  for (auto _ : st) benchmark::DoNotOptimize(sublaplacian(u));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_Energy(benchmark::State& st) {
  const BoxGrid g = cube(static_cast<int>(st.range(0)));
  const Field u = bump(g);
  const auto spec = NonlinearSpec::power(2.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(energy(u, u, {1.0, 1.0}, spec));
}

void BM_RK4Step(benchmark::State& st) {
  const BoxGrid g = cube(static_cast<int>(st.range(0)));
  const State s0{bump(g), Field(g), 0.0};
  const auto spec = NonlinearSpec::power(2.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(step(s0, 1e-3, {1.0, 1.0}, spec));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_SpectralBound(benchmark::State& st) {
  const BoxGrid g = cube(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(spectral_bound(g).value);
}

}  // namespace

BENCHMARK(BM_XForward)->Arg(17)->Arg(33)->Arg(65);
BENCHMARK(BM_SubLaplacian)->Arg(17)->Arg(33)->Arg(65);
BENCHMARK(BM_Energy)->Arg(33);
BENCHMARK(BM_RK4Step)->Arg(17)->Arg(33);
BENCHMARK(BM_SpectralBound)->Arg(17);
BENCHMARK_MAIN();
