#pragma once

// Heisenberg group H^n: group law, dilations, and exact application of the
// left-invariant horizontal vector fields to closed-form test functions.
//
// Coordinates are (x_1..x_n, y_1..y_n, s). The central coordinate is called
// s throughout so that t/tau stay reserved for simulation time.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hkglab/errors.hpp"

namespace hkglab {

using cplx = std::complex<double>;

struct GroupPoint {
  std::vector<double> x;
  std::vector<double> y;
  double s = 0.0;

  GroupPoint() = default;
  GroupPoint(std::vector<double> x_, std::vector<double> y_, double s_);

  /// Origin of H^n.
  static GroupPoint zero(int n);

  int n() const { return static_cast<int>(x.size()); }
  /// Number of Euclidean coordinates, 2n+1.
  int dim() const { return 2 * n() + 1; }
  /// Euclidean coordinate k in the order x_1..x_n, y_1..y_n, s.
  double coord(int k) const;
  bool finite() const;
};

/// Max-norm distance in R^{2n+1}; used for tolerance checks.
double max_abs_diff(const GroupPoint& a, const GroupPoint& b);

GroupPoint mul(const GroupPoint& xi, const GroupPoint& eta);
GroupPoint inverse(const GroupPoint& xi);
GroupPoint dilate(double lambda, const GroupPoint& xi);

/// Value, gradient and Hessian of a scalar function at a point. The Hessian
/// is stored as its lower triangle so symmetry holds by construction.
class Jet2 {
 public:
  explicit Jet2(int dim = 0);

  int dim() const { return dim_; }
  cplx value = 0.0;
  std::vector<cplx> grad;

  cplx hess(int a, int b) const;
  void set_hess(int a, int b, cplx v);
  bool finite() const;

 private:
  int dim_;
  std::vector<cplx> lower_;
  std::size_t tri(int a, int b) const;
};

/// A closed-form function on H^n with exact first and second derivatives.
class TestFunction {
 public:
  using Eval = std::function<Jet2(const GroupPoint&)>;

  TestFunction(std::string name, int n, Eval eval);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  Jet2 jet(const GroupPoint& xi) const;
  cplx operator()(const GroupPoint& xi) const { return jet(xi).value; }

  /// Monomial prod_k z_k^{e_k} over the 2n+1 coordinates.
  static TestFunction monomial(int n, std::vector<int> exponents, cplx coeff = 1.0);
  /// amplitude * exp(-|xi - center|^2 / width^2) with the Euclidean norm.
  static TestFunction gaussian(int n, cplx amplitude, double width, std::vector<double> center);
  /// prod_k sin(freq_k z_k + phase_k).
  static TestFunction sine_product(int n, std::vector<double> freq, std::vector<double> phase);
  static TestFunction constant(int n, cplx c);

 private:
  std::string name_;
  int n_;
  Eval eval_;
};

/// Built-in catalog: every monomial x_i^a y_j^b s^c with a+b+c <= 4 (i, j over
/// all index pairs), a few Gaussian bumps and sine products.
std::vector<TestFunction> test_function_catalog(int n);

/// A horizontal vector field d/dz_axis + coupling * z_partner * d/ds. The
/// left-invariant fields are X_i (axis x_i, partner y_i, coupling +2) and
/// Y_i (axis y_i, partner x_i, coupling -2). The coupling is exposed so test
/// fixtures can inject a defective field.
struct HorizontalField {
  int axis = 0;
  int partner = 0;
  double coupling = 0.0;

  static HorizontalField X(int n, int i);
  static HorizontalField Y(int n, int i);

  cplx apply(const Jet2& f, const GroupPoint& xi) const;
  /// (outer o inner) f evaluated exactly from the second-order jet of f.
  static cplx apply_composed(const HorizontalField& outer, const HorizontalField& inner,
                             const Jet2& f, const GroupPoint& xi);
};

/// X_i f at xi, with i one-based as in the usual notation (1 <= i <= n).
cplx apply_X(int i, const TestFunction& f, const GroupPoint& xi);
cplx apply_Y(int i, const TestFunction& f, const GroupPoint& xi);

/// X_i(Y_i f) - Y_i(X_i f) + 4 d_s f; vanishes identically for smooth f.
cplx commutator_defect(int i, const TestFunction& f, const GroupPoint& xi);
/// Same, with caller-supplied fields (used by the mutation fixtures).
cplx commutator_defect(const HorizontalField& X, const HorizontalField& Y, const Jet2& f,
                       const GroupPoint& xi);

/// Sub-Laplacian sum_i (X_i^2 + Y_i^2) f assembled from the jet.
cplx apply_sublaplacian_exact(const TestFunction& f, const GroupPoint& xi);
cplx apply_sublaplacian_exact(const Jet2& f, const GroupPoint& xi);

}  // namespace hkglab
