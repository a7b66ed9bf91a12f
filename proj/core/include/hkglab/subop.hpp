#pragma once

// Discrete horizontal gradient and sub-Laplacian in summation-by-parts form.
//
//   X_i^+ u = D^+_{x_i} u + 2 y_i D^+_s u,   Y_i^+ u = D^+_{y_i} u - 2 x_i D^+_s u
//   L_h u   = sum_i X_i^-(X_i^+ u) + Y_i^-(Y_i^+ u)
//
// The coefficients are frozen at cell centers and never vary along the axes
// they multiply, so (X_i^+)^* = -X_i^- holds exactly and
// <L_h u, u> = -sum_i (|X_i^+ u|^2 + |Y_i^+ u|^2).

#include <functional>
#include <vector>

#include "hkglab/grid.hpp"
#include "hkglab/hgroup.hpp"

namespace hkglab {

/// One-sided difference along an axis with the grid's boundary rule.
/// Dirichlet ghosts are zero on both sides; periodic axes wrap.
Field forward_diff(int axis, const Field& u);
Field backward_diff(int axis, const Field& u);

/// Forward/backward discretization of a horizontal field on the grid.
Field horizontal_forward(const HorizontalField& hf, const Field& u);
Field horizontal_backward(const HorizontalField& hf, const Field& u);

/// i is one-based, 1 <= i <= n.
Field x_forward(int i, const Field& u);
Field y_forward(int i, const Field& u);
Field x_backward(int i, const Field& u);
Field y_backward(int i, const Field& u);

struct HorizontalGradient {
  /// X_1^+ u .. X_n^+ u, Y_1^+ u .. Y_n^+ u
  std::vector<Field> components;

  double norm_sq() const;
};

HorizontalGradient grad_h(const Field& u);
/// |grad_h u|^2 without materializing the components.
double grad_h_norm_sq(const Field& u);

Field sublaplacian(const Field& u);
/// out = sublaplacian(u), reusing out's storage.
void sublaplacian_into(const Field& u, Field& out);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on a symmetric positive semi-definite operator, returning
/// the Rayleigh quotient. Stops after max_iter or when the relative change
/// drops below rel_tol. Throws InputError on a zero start vector.
PowerIterationResult power_iteration(const std::function<Field(const Field&)>& op, Field start,
                                     int max_iter = 200, double rel_tol = 1e-6);

struct SpectralBound {
  double value = 0.0;
  bool converged = false;  ///< false means value is the closed-form fallback
  int iterations = 0;
};

/// Largest eigenvalue of -L_h by power iteration from a fixed pseudo-random
/// start; falls back to closed_form_spectral_bound when it does not settle.
SpectralBound spectral_bound(const BoxGrid& grid);

/// Rigorous upper bound on |L_h|. Each horizontal field satisfies
/// |X_i^+| <= |D^+_x| + 2 max|y_i| |D^+_s| <= 2/h_x + 4 max|y_i| / h_s, and
/// -L_h = sum_i (X_i^+)^* X_i^+ + (Y_i^+)^* Y_i^+, so
///   |L_h| <= n [ (2/h_x + 4 Y/h_s)^2 + (2/h_y + 4 X/h_s)^2 ]
/// with X, Y the largest cell-center coordinates. Expanding the squares gives
/// 4/h_x^2 + 4/h_y^2 + 16 (X^2+Y^2)/h_s^2 plus the cross terms.
double closed_form_spectral_bound(const BoxGrid& grid);

}  // namespace hkglab
