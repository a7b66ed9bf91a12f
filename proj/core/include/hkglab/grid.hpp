#pragma once

// Truncated box discretization of H^n and complex grid fields.
//
// Cells are centered: coordinate j on an axis with N points and half-width L
// is -L + (j + 1/2) h, h = 2L/N. Values are stored with the axis order
// x_1..x_n, y_1..y_n, s and s varying fastest.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hkglab/errors.hpp"
#include "hkglab/hgroup.hpp"

namespace hkglab {

enum class Boundary {
  dirichlet,  ///< ghost values outside the box are zero
  periodic,   ///< indices wrap on every axis
  /// Dirichlet on the horizontal axes, periodic along s. Needed for
  /// s-independent fields such as the discrete eigenmodes.
  dirichlet_periodic_s,
};

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& s);

class BoxGrid {
 public:
  BoxGrid() = default;
  BoxGrid(int n, int Nx, int Ny, int Ns, double L_xy, double L_s, Boundary bc);

  /// Desk-scale default: n = 1, 33^3, L_xy = 6, L_s = 12, Dirichlet.
  static BoxGrid desk_default();

  int n() const { return n_; }
  int Nx() const { return Nx_; }
  int Ny() const { return Ny_; }
  int Ns() const { return Ns_; }
  double L_xy() const { return L_xy_; }
  double L_s() const { return L_s_; }
  Boundary bc() const { return bc_; }

  double h_x() const { return 2.0 * L_xy_ / Nx_; }
  double h_y() const { return 2.0 * L_xy_ / Ny_; }
  double h_s() const { return 2.0 * L_s_ / Ns_; }
  double h_vol() const { return h_vol_; }

  /// Number of axes, 2n+1.
  int axes() const { return 2 * n_ + 1; }
  int s_axis() const { return 2 * n_; }
  int x_axis(int i) const { return i; }       // zero-based i
  int y_axis(int i) const { return n_ + i; }  // zero-based i
  int points(int axis) const { return dims_[axis]; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  double spacing(int axis) const;
  double half_width(int axis) const { return axis == s_axis() ? L_s_ : L_xy_; }
  bool periodic(int axis) const;
  std::size_t size() const { return size_; }

  /// Cell-centered coordinate of index j along an axis.
  double coordinate(int axis, int j) const {
    return -half_width(axis) + (j + 0.5) * spacing(axis);
  }
  /// Index along an axis of a flat cell index.
  int axis_index(std::size_t flat, int axis) const {
    return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(dims_[axis]));
  }

  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> idx) const;
  /// Index reflected through the box center.
  std::vector<int> mirror(std::span<const int> idx) const;
  GroupPoint coordinates(std::span<const int> idx) const;
  GroupPoint coordinates(std::size_t flat) const;

  bool operator==(const BoxGrid& other) const;

 private:
  int n_ = 1;
  int Nx_ = 4, Ny_ = 4, Ns_ = 4;
  double L_xy_ = 1.0, L_s_ = 1.0;
  Boundary bc_ = Boundary::dirichlet;
  double h_vol_ = 0.0;
  std::size_t size_ = 0;
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
};

class Field {
 public:
  Field() = default;
  explicit Field(const BoxGrid& grid, cplx fill = 0.0);
  Field(const BoxGrid& grid, std::vector<cplx> values);

  const BoxGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Rescans the values and records whether any is non-finite.
  bool update_validity();
  /// Result of the last update_validity() (true after construction).
  bool valid() const { return valid_; }

 private:
  BoxGrid grid_;
  std::vector<cplx> values_;
  bool valid_ = true;
};

void require_same_grid(const Field& a, const Field& b);

Field sample(const BoxGrid& grid, const TestFunction& f);

/// Sum of term(i), i in [0, count), in a fixed block-tree order. The result
/// is independent of how callers partition work.
template <class Term>
double tree_sum(std::size_t count, Term&& term);

/// Hermitian pairing sum u conj(v) h_vol.
cplx inner(const Field& u, const Field& v);
double l2_norm_sq(const Field& u);
double linf_norm(const Field& u);

// Snapshot files. The first line is the grid header
// "n,N_x,N_y,N_s,L_xy,L_s,bc" written with values, e.g.
// "1,33,33,33,6,12,dirichlet". The CSV body has one "re,im" line per cell in
// storage order; the binary body is interleaved little-endian doubles.
void write_snapshot_csv(const Field& u, const std::filesystem::path& path);
Field read_snapshot_csv(const std::filesystem::path& path);
void write_snapshot_binary(const Field& u, const std::filesystem::path& path);
Field read_snapshot_binary(const std::filesystem::path& path);
std::string grid_header(const BoxGrid& grid);
BoxGrid parse_grid_header(const std::string& line);

// --- implementation --------------------------------------------------------

namespace detail {
inline constexpr std::size_t kReduceBlock = 512;
}

template <class Term>
double tree_sum(std::size_t count, Term&& term) {
  if (count == 0) return 0.0;
  const std::size_t blocks = (count + detail::kReduceBlock - 1) / detail::kReduceBlock;
  std::vector<double> partial(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * detail::kReduceBlock;
    const std::size_t hi = std::min(count, lo + detail::kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[b] = acc;
  }
  for (std::size_t width = 1; width < blocks; width *= 2)
    for (std::size_t b = 0; b + width < blocks; b += 2 * width) partial[b] += partial[b + width];
  return partial[0];
}

}  // namespace hkglab
