#pragma once

#include <random>

#include "hkglab/grid.hpp"

namespace testing {

inline hkglab::Field random_field(const hkglab::BoxGrid& g, std::mt19937_64& rng, double r = 1.0) {
  std::uniform_real_distribution<double> d(-r, r);
  hkglab::Field f(g);
  for (auto& z : f.values()) z = hkglab::cplx(d(rng), d(rng));
  return f;
}

inline hkglab::GroupPoint random_point(int n, std::mt19937_64& rng, double r = 1.0) {
  std::uniform_real_distribution<double> d(-r, r);
  hkglab::GroupPoint p = hkglab::GroupPoint::zero(n);
  for (auto& v : p.x) v = d(rng);
  for (auto& v : p.y) v = d(rng);
  p.s = d(rng);
  return p;
}

// Naive left-to-right sums, independent of the library's reduction tree.
inline double naive_norm_sq(const hkglab::Field& u) {
  double acc = 0.0;
  for (const auto& z : u.values()) acc += std::norm(z);
  return acc * u.grid().h_vol();
}

inline hkglab::cplx naive_inner(const hkglab::Field& u, const hkglab::Field& v) {
  hkglab::cplx acc = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) acc += u[c] * std::conj(v[c]);
  return acc * u.grid().h_vol();
}

}  // namespace testing
