#include "hkglab/grid.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hkglab {

std::string to_string(Boundary bc) {
  switch (bc) {
    case Boundary::dirichlet: return "dirichlet";
    case Boundary::periodic: return "periodic";
    case Boundary::dirichlet_periodic_s: return "dirichlet_periodic_s";
  }
  return "dirichlet";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return Boundary::dirichlet;
  if (s == "periodic") return Boundary::periodic;
  if (s == "dirichlet_periodic_s") return Boundary::dirichlet_periodic_s;
  throw InputError("unknown boundary condition '" + s + "'");
}

BoxGrid::BoxGrid(int n, int Nx, int Ny, int Ns, double L_xy, double L_s, Boundary bc)
    : n_(n), Nx_(Nx), Ny_(Ny), Ns_(Ns), L_xy_(L_xy), L_s_(L_s), bc_(bc) {
  if (n < 1) throw InputError("group parameter n must be >= 1");
  if (Nx < 4 || Ny < 4 || Ns < 4) throw InputError("every axis needs at least 4 points");
  if (!(L_xy > 0.0) || !(L_s > 0.0) || !std::isfinite(L_xy) || !std::isfinite(L_s))
    throw InputError("box half-widths must be positive and finite");

  dims_.assign(axes(), 0);
  for (int i = 0; i < n; ++i) {
    dims_[x_axis(i)] = Nx;
    dims_[y_axis(i)] = Ny;
  }
  dims_[s_axis()] = Ns;
  strides_.assign(axes(), 1);
  for (int a = axes() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * dims_[a + 1];
  size_ = strides_[0] * dims_[0];
  h_vol_ = std::pow(h_x(), n) * std::pow(h_y(), n) * h_s();
}

BoxGrid BoxGrid::desk_default() { return BoxGrid(1, 33, 33, 33, 6.0, 12.0, Boundary::dirichlet); }

double BoxGrid::spacing(int axis) const {
  if (axis == s_axis()) return h_s();
  return axis < n_ ? h_x() : h_y();
}

bool BoxGrid::periodic(int axis) const {
  switch (bc_) {
    case Boundary::periodic: return true;
    case Boundary::dirichlet_periodic_s: return axis == s_axis();
    case Boundary::dirichlet: return false;
  }
  return false;
}

std::vector<int> BoxGrid::multi_index(std::size_t flat) const {
  if (flat >= size_) throw InputError("flat index out of bounds");
  std::vector<int> idx(axes());
  for (int a = 0; a < axes(); ++a) idx[a] = axis_index(flat, a);
  return idx;
}

std::size_t BoxGrid::flat_index(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != axes()) throw InputError("multi-index has wrong rank");
  std::size_t flat = 0;
  for (int a = 0; a < axes(); ++a) {
    if (idx[a] < 0 || idx[a] >= dims_[a]) throw InputError("multi-index out of bounds");
    flat += strides_[a] * static_cast<std::size_t>(idx[a]);
  }
  return flat;
}

std::vector<int> BoxGrid::mirror(std::span<const int> idx) const {
  flat_index(idx);  // bounds check
  std::vector<int> out(idx.begin(), idx.end());
  for (int a = 0; a < axes(); ++a) out[a] = dims_[a] - 1 - idx[a];
  return out;
}

GroupPoint BoxGrid::coordinates(std::span<const int> idx) const {
  flat_index(idx);
  GroupPoint p = GroupPoint::zero(n_);
  for (int i = 0; i < n_; ++i) {
    p.x[i] = coordinate(x_axis(i), idx[x_axis(i)]);
    p.y[i] = coordinate(y_axis(i), idx[y_axis(i)]);
  }
  p.s = coordinate(s_axis(), idx[s_axis()]);
  return p;
}

GroupPoint BoxGrid::coordinates(std::size_t flat) const {
  const auto idx = multi_index(flat);
  return coordinates(std::span<const int>(idx));
}

bool BoxGrid::operator==(const BoxGrid& o) const {
  return n_ == o.n_ && Nx_ == o.Nx_ && Ny_ == o.Ny_ && Ns_ == o.Ns_ && L_xy_ == o.L_xy_ &&
         L_s_ == o.L_s_ && bc_ == o.bc_;
}

// --- Field -----------------------------------------------------------------

Field::Field(const BoxGrid& grid, cplx fill) : grid_(grid), values_(grid.size(), fill) {
  update_validity();
}

Field::Field(const BoxGrid& grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InputError("field length does not match grid");
  update_validity();
}

bool Field::update_validity() {
  valid_ = std::all_of(values_.begin(), values_.end(), [](cplx c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
  return valid_;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw InputError("fields live on different grids");
}

Field sample(const BoxGrid& grid, const TestFunction& f) {
  if (f.n() != grid.n()) throw InputError("test function and grid disagree on n");
  Field out(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) out[c] = f(grid.coordinates(c));
  out.update_validity();
  return out;
}

cplx inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const auto a = u.values();
  const auto b = v.values();
  const double re = tree_sum(a.size(), [&](std::size_t i) {
    return a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  });
  const double im = tree_sum(a.size(), [&](std::size_t i) {
    return a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  });
  const double h = u.grid().h_vol();
  return {re * h, im * h};
}

double l2_norm_sq(const Field& u) {
  const auto a = u.values();
  return tree_sum(a.size(), [&](std::size_t i) { return std::norm(a[i]); }) * u.grid().h_vol();
}

double linf_norm(const Field& u) {
  double m = 0.0;
  for (const cplx& c : u.values()) {
    const double a = std::abs(c);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

// --- snapshots -------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string grid_header(const BoxGrid& g) {
  std::ostringstream os;
  os << g.n() << ',' << g.Nx() << ',' << g.Ny() << ',' << g.Ns() << ',' << fmt_double(g.L_xy())
     << ',' << fmt_double(g.L_s()) << ',' << to_string(g.bc());
  return os.str();
}

BoxGrid parse_grid_header(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) parts.push_back(tok);
  if (parts.size() != 7) throw InputError("snapshot header must have 7 fields: " + line);
  try {
    return BoxGrid(std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2]),
                   std::stoi(parts[3]), std::stod(parts[4]), std::stod(parts[5]),
                   boundary_from_string(parts[6]));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("malformed snapshot header: " + line);
  }
}

void write_snapshot_csv(const Field& u, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << grid_header(u.grid()) << '\n';
  for (const cplx& c : u.values()) out << fmt_double(c.real()) << ',' << fmt_double(c.imag()) << '\n';
}

Field read_snapshot_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const BoxGrid grid = parse_grid_header(line);
  std::vector<cplx> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("malformed snapshot row: " + line);
    values.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return Field(grid, std::move(values));
}

void write_snapshot_binary(const Field& u, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "binary snapshots assume little endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << grid_header(u.grid()) << '\n';
  for (const cplx& c : u.values()) {
    const double pair[2] = {c.real(), c.imag()};
    out.write(reinterpret_cast<const char*>(pair), sizeof pair);
  }
}

Field read_snapshot_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const BoxGrid grid = parse_grid_header(line);
  std::vector<cplx> values(grid.size());
  for (auto& c : values) {
    double pair[2];
    if (!in.read(reinterpret_cast<char*>(pair), sizeof pair))
      throw InputError("binary snapshot truncated");
    c = {pair[0], pair[1]};
  }
  return Field(grid, std::move(values));
}

}  // namespace hkglab
