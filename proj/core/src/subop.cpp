#include "hkglab/subop.hpp"

#include <cmath>
#include <random>

namespace hkglab {

namespace {

// u at the cell one step forward (+1) or backward (-1) along axis, honoring
// the boundary rule.
inline cplx shifted(const BoxGrid& g, std::span<const cplx> u, std::size_t c, int axis, int dir) {
  const int N = g.points(axis);
  const std::size_t st = g.stride(axis);
  const int j = g.axis_index(c, axis);
  if (dir > 0) {
    if (j + 1 < N) return u[c + st];
    return g.periodic(axis) ? u[c - st * static_cast<std::size_t>(N - 1)] : cplx(0.0);
  }
  if (j > 0) return u[c - st];
  return g.periodic(axis) ? u[c + st * static_cast<std::size_t>(N - 1)] : cplx(0.0);
}

void check_index(int i, int n) {
  if (i < 1 || i > n) throw InputError("horizontal field index out of range");
}

// Walks the cells in storage order keeping the multi-index up to date.
class CellCursor {
 public:
  explicit CellCursor(const BoxGrid& g) : g_(g), idx_(g.axes(), 0) {}
  int operator[](int axis) const { return idx_[axis]; }
  void advance() {
    for (int a = g_.axes() - 1; a >= 0; --a) {
      if (++idx_[a] < g_.points(a)) return;
      idx_[a] = 0;
    }
  }

 private:
  const BoxGrid& g_;
  std::vector<int> idx_;
};

// Neighbor along axis with the boundary rule, given the index j on that axis.
inline cplx neighbor(const BoxGrid& g, std::span<const cplx> u, std::size_t c, int axis, int j,
                     int dir) {
  const int N = g.points(axis);
  const std::size_t st = g.stride(axis);
  if (dir > 0) {
    if (j + 1 < N) return u[c + st];
    return g.periodic(axis) ? u[c - st * static_cast<std::size_t>(N - 1)] : cplx(0.0);
  }
  if (j > 0) return u[c - st];
  return g.periodic(axis) ? u[c + st * static_cast<std::size_t>(N - 1)] : cplx(0.0);
}

// out[c] (+)= D^{dir}_axis u + coeff(c) D^{dir}_s u with coeff = coupling * z_partner.
template <bool Accumulate>
void horizontal_kernel(const HorizontalField& hf, const Field& u, Field& out, int dir) {
  const BoxGrid& g = u.grid();
  const int sa = g.s_axis();
  const double inv_h = 1.0 / g.spacing(hf.axis);
  const double inv_hs = 1.0 / g.spacing(sa);
  const auto in = u.values();
  auto res = out.values();
  std::vector<double> coeff(g.points(hf.partner));
  for (int j = 0; j < g.points(hf.partner); ++j)
    coeff[j] = hf.coupling * g.coordinate(hf.partner, j);
  CellCursor cur(g);
  for (std::size_t c = 0; c < g.size(); ++c, cur.advance()) {
    const cplx here = in[c];
    const cplx nb_a = neighbor(g, in, c, hf.axis, cur[hf.axis], dir);
    const cplx nb_s = neighbor(g, in, c, sa, cur[sa], dir);
    const cplx da = (dir > 0 ? nb_a - here : here - nb_a) * inv_h;
    const cplx ds = (dir > 0 ? nb_s - here : here - nb_s) * inv_hs;
    const cplx v = da + coeff[cur[hf.partner]] * ds;
    if constexpr (Accumulate)
      res[c] += v;
    else
      res[c] = v;
  }
}

Field diff(int axis, const Field& u, int dir) {
  const BoxGrid& g = u.grid();
  if (axis < 0 || axis >= g.axes()) throw InputError("axis out of range");
  Field out(g);
  const double inv_h = 1.0 / g.spacing(axis);
  const auto in = u.values();
  for (std::size_t c = 0; c < g.size(); ++c) {
    out[c] = dir > 0 ? (shifted(g, in, c, axis, 1) - in[c]) * inv_h
                     : (in[c] - shifted(g, in, c, axis, -1)) * inv_h;
  }
  return out;
}

}  // namespace

Field forward_diff(int axis, const Field& u) { return diff(axis, u, 1); }
Field backward_diff(int axis, const Field& u) { return diff(axis, u, -1); }

Field horizontal_forward(const HorizontalField& hf, const Field& u) {
  Field out(u.grid());
  horizontal_kernel<false>(hf, u, out, 1);
  return out;
}

Field horizontal_backward(const HorizontalField& hf, const Field& u) {
  Field out(u.grid());
  horizontal_kernel<false>(hf, u, out, -1);
  return out;
}

Field x_forward(int i, const Field& u) {
  check_index(i, u.grid().n());
  return horizontal_forward(HorizontalField::X(u.grid().n(), i), u);
}

Field y_forward(int i, const Field& u) {
  check_index(i, u.grid().n());
  return horizontal_forward(HorizontalField::Y(u.grid().n(), i), u);
}

Field x_backward(int i, const Field& u) {
  check_index(i, u.grid().n());
  return horizontal_backward(HorizontalField::X(u.grid().n(), i), u);
}

Field y_backward(int i, const Field& u) {
  check_index(i, u.grid().n());
  return horizontal_backward(HorizontalField::Y(u.grid().n(), i), u);
}

double HorizontalGradient::norm_sq() const {
  double acc = 0.0;
  for (const Field& f : components) acc += l2_norm_sq(f);
  return acc;
}

HorizontalGradient grad_h(const Field& u) {
  const int n = u.grid().n();
  HorizontalGradient g;
  g.components.reserve(2 * n);
  for (int i = 1; i <= n; ++i) g.components.push_back(x_forward(i, u));
  for (int i = 1; i <= n; ++i) g.components.push_back(y_forward(i, u));
  return g;
}

double grad_h_norm_sq(const Field& u) {
  const int n = u.grid().n();
  Field tmp(u.grid());
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    horizontal_kernel<false>(HorizontalField::X(n, i), u, tmp, 1);
    acc += l2_norm_sq(tmp);
    horizontal_kernel<false>(HorizontalField::Y(n, i), u, tmp, 1);
    acc += l2_norm_sq(tmp);
  }
  return acc;
}

void sublaplacian_into(const Field& u, Field& out) {
  const int n = u.grid().n();
  if (!(out.grid() == u.grid())) out = Field(u.grid());
  std::fill(out.values().begin(), out.values().end(), cplx(0.0));
  Field tmp(u.grid());
  for (int i = 1; i <= n; ++i) {
    for (const HorizontalField& hf : {HorizontalField::X(n, i), HorizontalField::Y(n, i)}) {
      horizontal_kernel<false>(hf, u, tmp, 1);
      horizontal_kernel<true>(hf, tmp, out, -1);
    }
  }
}

Field sublaplacian(const Field& u) {
  Field out(u.grid());
  sublaplacian_into(u, out);
  return out;
}

PowerIterationResult power_iteration(const std::function<Field(const Field&)>& op, Field v,
                                     int max_iter, double rel_tol) {
  double norm = std::sqrt(l2_norm_sq(v));
  if (!(norm > 0.0)) throw InputError("power iteration needs a nonzero start vector");
  for (auto& c : v.values()) c /= norm;

  PowerIterationResult res;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Field w = op(v);
    const double rq = inner(w, v).real();  // |v| = 1
    const double wn = std::sqrt(l2_norm_sq(w));
    res.eigenvalue = rq;
    res.iterations = it;
    if (!(wn > 0.0)) {  // v in the null space
      res.converged = true;
      return res;
    }
    if (it > 1 && std::abs(rq - prev) <= rel_tol * std::abs(rq)) {
      res.converged = true;
      return res;
    }
    prev = rq;
    for (std::size_t c = 0; c < w.size(); ++c) v[c] = w[c] / wn;
  }
  return res;
}

double closed_form_spectral_bound(const BoxGrid& g) {
  const double xmax = g.L_xy() - 0.5 * g.h_x();
  const double ymax = g.L_xy() - 0.5 * g.h_y();
  const double bx = 2.0 / g.h_x() + 4.0 * ymax / g.h_s();
  const double by = 2.0 / g.h_y() + 4.0 * xmax / g.h_s();
  return g.n() * (bx * bx + by * by);
}

SpectralBound spectral_bound(const BoxGrid& grid) {
  Field start(grid);
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& c : start.values()) c = dist(rng);
  const auto res = power_iteration(
      [](const Field& f) {
        Field w = sublaplacian(f);
        for (auto& c : w.values()) c = -c;
        return w;
      },
      std::move(start));
  if (res.converged) return {res.eigenvalue, true, res.iterations};
  return {closed_form_spectral_bound(grid), false, res.iterations};
}

}  // namespace hkglab
