#include "hkglab/hgroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace hkglab {

namespace {

void require_same_n(const GroupPoint& a, const GroupPoint& b) {
  if (a.n() != b.n() || a.y.size() != b.y.size())
    throw InputError("group points have different dimension n");
}

void require_index(int i, int n) {
  if (i < 1 || i > n)
    throw InputError("vector field index " + std::to_string(i) + " outside 1.." +
                     std::to_string(n));
}

// k-th derivative of z^e.
double pow_derivative(double z, int e, int k) {
  if (k > e) return 0.0;
  double c = 1.0;
  for (int j = 0; j < k; ++j) c *= static_cast<double>(e - j);
  return c * std::pow(z, e - k);
}

}  // namespace

GroupPoint::GroupPoint(std::vector<double> x_, std::vector<double> y_, double s_)
    : x(std::move(x_)), y(std::move(y_)), s(s_) {
  if (x.size() != y.size()) throw InputError("x and y must have the same length");
}

GroupPoint GroupPoint::zero(int n) {
  return GroupPoint(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0);
}

double GroupPoint::coord(int k) const {
  const int nn = n();
  if (k < nn) return x[k];
  if (k < 2 * nn) return y[k - nn];
  return s;
}

bool GroupPoint::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(x.begin(), x.end(), ok) && std::all_of(y.begin(), y.end(), ok) &&
         std::isfinite(s);
}

double max_abs_diff(const GroupPoint& a, const GroupPoint& b) {
  require_same_n(a, b);
  double d = std::abs(a.s - b.s);
  for (int i = 0; i < a.n(); ++i) {
    d = std::max(d, std::abs(a.x[i] - b.x[i]));
    d = std::max(d, std::abs(a.y[i] - b.y[i]));
  }
  return d;
}

GroupPoint mul(const GroupPoint& xi, const GroupPoint& eta) {
  require_same_n(xi, eta);
  const int n = xi.n();
  GroupPoint out = GroupPoint::zero(n);
  double twist = 0.0;
  for (int i = 0; i < n; ++i) {
    out.x[i] = xi.x[i] + eta.x[i];
    out.y[i] = xi.y[i] + eta.y[i];
    twist += eta.x[i] * xi.y[i] - xi.x[i] * eta.y[i];
  }
  out.s = xi.s + eta.s + 2.0 * twist;
  return out;
}

GroupPoint inverse(const GroupPoint& xi) {
  GroupPoint out = xi;
  for (auto& v : out.x) v = -v;
  for (auto& v : out.y) v = -v;
  out.s = -out.s;
  return out;
}

GroupPoint dilate(double lambda, const GroupPoint& xi) {
  if (!(lambda > 0.0)) throw InputError("dilation factor must be positive");
  GroupPoint out = xi;
  for (auto& v : out.x) v *= lambda;
  for (auto& v : out.y) v *= lambda;
  out.s *= lambda * lambda;
  return out;
}

// --- Jet2 ------------------------------------------------------------------

Jet2::Jet2(int dim)
    : grad(static_cast<std::size_t>(dim), 0.0),
      dim_(dim),
      lower_(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0) {}

std::size_t Jet2::tri(int a, int b) const {
  if (a < b) std::swap(a, b);
  return static_cast<std::size_t>(a) * (a + 1) / 2 + b;
}

cplx Jet2::hess(int a, int b) const { return lower_[tri(a, b)]; }

void Jet2::set_hess(int a, int b, cplx v) { lower_[tri(a, b)] = v; }

bool Jet2::finite() const {
  auto ok = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
  return ok(value) && std::all_of(grad.begin(), grad.end(), ok) &&
         std::all_of(lower_.begin(), lower_.end(), ok);
}

// --- TestFunction ----------------------------------------------------------

TestFunction::TestFunction(std::string name, int n, Eval eval)
    : name_(std::move(name)), n_(n), eval_(std::move(eval)) {}

Jet2 TestFunction::jet(const GroupPoint& xi) const {
  if (xi.n() != n_) throw InputError("test function '" + name_ + "' evaluated at wrong n");
  return eval_(xi);
}

TestFunction TestFunction::monomial(int n, std::vector<int> exponents, cplx coeff) {
  const int dim = 2 * n + 1;
  if (static_cast<int>(exponents.size()) != dim)
    throw InputError("monomial needs 2n+1 exponents");
  std::string name = "mono";
  for (int e : exponents) name += "_" + std::to_string(e);
  return TestFunction(name, n, [dim, exponents, coeff](const GroupPoint& xi) {
    Jet2 j(dim);
    std::vector<double> z(dim);
    for (int k = 0; k < dim; ++k) z[k] = xi.coord(k);
    // Product with selected derivative orders per axis.
    auto term = [&](int a, int oa, int b, int ob) {
      double p = 1.0;
      for (int k = 0; k < dim; ++k) {
        int order = 0;
        if (k == a) order += oa;
        if (k == b) order += ob;
        p *= pow_derivative(z[k], exponents[k], order);
      }
      return coeff * p;
    };
    j.value = term(-1, 0, -1, 0);
    for (int a = 0; a < dim; ++a) {
      j.grad[a] = term(a, 1, -1, 0);
      for (int b = 0; b <= a; ++b) j.set_hess(a, b, term(a, 1, b, 1));
    }
    return j;
  });
}

TestFunction TestFunction::gaussian(int n, cplx amplitude, double width,
                                    std::vector<double> center) {
  const int dim = 2 * n + 1;
  if (static_cast<int>(center.size()) != dim) throw InputError("gaussian center needs 2n+1 entries");
  if (!(width > 0.0)) throw InputError("gaussian width must be positive");
  const double w2 = width * width;
  return TestFunction("gauss", n, [=](const GroupPoint& xi) {
    Jet2 j(dim);
    std::vector<double> d(dim);
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      d[k] = xi.coord(k) - center[k];
      r2 += d[k] * d[k];
    }
    const cplx g = amplitude * std::exp(-r2 / w2);
    j.value = g;
    for (int a = 0; a < dim; ++a) {
      j.grad[a] = g * (-2.0 * d[a] / w2);
      for (int b = 0; b <= a; ++b) {
        double h = 4.0 * d[a] * d[b] / (w2 * w2);
        if (a == b) h -= 2.0 / w2;
        j.set_hess(a, b, g * h);
      }
    }
    return j;
  });
}

TestFunction TestFunction::sine_product(int n, std::vector<double> freq, std::vector<double> phase) {
  const int dim = 2 * n + 1;
  if (static_cast<int>(freq.size()) != dim || static_cast<int>(phase.size()) != dim)
    throw InputError("sine product needs 2n+1 frequencies and phases");
  return TestFunction("sines", n, [=](const GroupPoint& xi) {
    Jet2 j(dim);
    std::vector<double> sn(dim), cs(dim);
    for (int k = 0; k < dim; ++k) {
      const double arg = freq[k] * xi.coord(k) + phase[k];
      sn[k] = std::sin(arg);
      cs[k] = std::cos(arg);
    }
    auto prod_except = [&](int a, int b) {
      double p = 1.0;
      for (int k = 0; k < dim; ++k)
        if (k != a && k != b) p *= sn[k];
      return p;
    };
    j.value = prod_except(-1, -1);
    for (int a = 0; a < dim; ++a) {
      j.grad[a] = freq[a] * cs[a] * prod_except(a, -1);
      for (int b = 0; b < a; ++b)
        j.set_hess(a, b, freq[a] * freq[b] * cs[a] * cs[b] * prod_except(a, b));
      j.set_hess(a, a, -freq[a] * freq[a] * prod_except(-1, -1));
    }
    return j;
  });
}

TestFunction TestFunction::constant(int n, cplx c) {
  const int dim = 2 * n + 1;
  return TestFunction("const", n, [=](const GroupPoint&) {
    Jet2 j(dim);
    j.value = c;
    return j;
  });
}

std::vector<TestFunction> test_function_catalog(int n) {
  const int dim = 2 * n + 1;
  std::vector<TestFunction> out;
  out.push_back(TestFunction::constant(n, cplx(1.5, -0.5)));
  // x_i^a y_j^b s^c, a+b+c <= 4, over all (i, j).
  for (int i = 0; i < n; ++i) {
    for (int jj = 0; jj < n; ++jj) {
      for (int a = 0; a <= 4; ++a) {
        for (int b = 0; a + b <= 4; ++b) {
          for (int c = 0; a + b + c <= 4; ++c) {
            if (a + b + c == 0) continue;
            // Pure s^c and x_i^a s^c terms repeat across jj; keep the first.
            if (b == 0 && jj > 0) continue;
            if (a == 0 && i > 0) continue;
            std::vector<int> e(dim, 0);
            e[i] += a;
            e[n + jj] += b;
            e[2 * n] += c;
            out.push_back(TestFunction::monomial(n, e));
          }
        }
      }
    }
  }
  std::vector<double> c0(dim, 0.0), c1(dim, 0.0);
  for (int k = 0; k < dim; ++k) c1[k] = 0.3 - 0.2 * k;
  out.push_back(TestFunction::gaussian(n, 1.0, 1.0, c0));
  out.push_back(TestFunction::gaussian(n, cplx(0.7, 1.3), 1.7, c1));
  std::vector<double> f1(dim), p1(dim), f2(dim), p2(dim);
  for (int k = 0; k < dim; ++k) {
    f1[k] = 0.5 + 0.25 * k;
    p1[k] = 0.1 * (k + 1);
    f2[k] = std::numbers::pi / (3.0 + k);
    p2[k] = std::numbers::pi / 2.0;
  }
  out.push_back(TestFunction::sine_product(n, f1, p1));
  out.push_back(TestFunction::sine_product(n, f2, p2));
  return out;
}

// --- Horizontal vector fields ----------------------------------------------

HorizontalField HorizontalField::X(int n, int i) {
  require_index(i, n);
  return {i - 1, n + i - 1, 2.0};
}

HorizontalField HorizontalField::Y(int n, int i) {
  require_index(i, n);
  return {n + i - 1, i - 1, -2.0};
}

cplx HorizontalField::apply(const Jet2& f, const GroupPoint& xi) const {
  const int s_axis = f.dim() - 1;
  return f.grad[axis] + coupling * xi.coord(partner) * f.grad[s_axis];
}

cplx HorizontalField::apply_composed(const HorizontalField& outer, const HorizontalField& inner,
                                     const Jet2& f, const GroupPoint& xi) {
  const int s_axis = f.dim() - 1;
  // g = inner f = f_a + c z_p f_s; the coefficient z_p depends only on z_p.
  auto dg = [&](int k) {
    cplx v = f.hess(inner.axis, k) + inner.coupling * xi.coord(inner.partner) * f.hess(s_axis, k);
    if (k == inner.partner) v += inner.coupling * f.grad[s_axis];
    return v;
  };
  return dg(outer.axis) + outer.coupling * xi.coord(outer.partner) * dg(s_axis);
}

cplx apply_X(int i, const TestFunction& f, const GroupPoint& xi) {
  return HorizontalField::X(f.n(), i).apply(f.jet(xi), xi);
}

cplx apply_Y(int i, const TestFunction& f, const GroupPoint& xi) {
  return HorizontalField::Y(f.n(), i).apply(f.jet(xi), xi);
}

cplx commutator_defect(const HorizontalField& X, const HorizontalField& Y, const Jet2& f,
                       const GroupPoint& xi) {
  const int s_axis = f.dim() - 1;
  return HorizontalField::apply_composed(X, Y, f, xi) - HorizontalField::apply_composed(Y, X, f, xi) +
         4.0 * f.grad[s_axis];
}

cplx commutator_defect(int i, const TestFunction& f, const GroupPoint& xi) {
  return commutator_defect(HorizontalField::X(f.n(), i), HorizontalField::Y(f.n(), i), f.jet(xi),
                           xi);
}

cplx apply_sublaplacian_exact(const Jet2& f, const GroupPoint& xi) {
  const int n = xi.n();
  const int s = 2 * n;
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = xi.x[i];
    const double y = xi.y[i];
    acc += f.hess(i, i) + f.hess(n + i, n + i) + 4.0 * y * f.hess(i, s) -
           4.0 * x * f.hess(n + i, s) + 4.0 * (x * x + y * y) * f.hess(s, s);
  }
  return acc;
}

cplx apply_sublaplacian_exact(const TestFunction& f, const GroupPoint& xi) {
  return apply_sublaplacian_exact(f.jet(xi), xi);
}

}  // namespace hkglab
