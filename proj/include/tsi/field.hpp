#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace tsi {

/// Raised when a computation produces or receives a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Axis-aligned interval or rectangle. One-dimensional domains ignore the
/// second coordinate of every point.
template <typename Scalar>
struct Domain {
  int dim = 1;
  std::array<Scalar, 2> lower{Scalar(0), Scalar(0)};
  std::array<Scalar, 2> upper{Scalar(1), Scalar(0)};

  static Domain interval(Scalar a, Scalar b) {
    Domain d;
    d.dim = 1;
    d.lower = {a, Scalar(0)};
    d.upper = {b, Scalar(0)};
    d.validate();
    return d;
  }

  static Domain rectangle(Scalar x0, Scalar x1, Scalar y0, Scalar y1) {
    Domain d;
    d.dim = 2;
    d.lower = {x0, y0};
    d.upper = {x1, y1};
    d.validate();
    return d;
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("domain dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
      if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(lower[a] < upper[a]))
        throw std::invalid_argument("domain requires finite lower < upper on every axis");
    }
  }

  Scalar length(int axis) const { return upper[axis] - lower[axis]; }

  Scalar measure() const { return dim == 1 ? length(0) : length(0) * length(1); }

  Point<Scalar> clamp(Point<Scalar> p) const {
    for (int a = 0; a < dim; ++a) p[a] = std::clamp(p[a], lower[a], upper[a]);
    if (dim == 1) p[1] = Scalar(0);
    return p;
  }

  bool contains(const Point<Scalar>& p) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lower[a] || p[a] > upper[a]) return false;
    return true;
  }

  friend bool operator==(const Domain& l, const Domain& r) {
    return l.dim == r.dim && l.lower == r.lower && l.upper == r.upper;
  }
};

/// Cell counts per axis; the second entry is zero for one-dimensional grids.
using Cells = std::array<int, 2>;

/// Scalar field sampled on the nodes of a uniform grid, evaluated by
/// piecewise (bi)linear interpolation. Node (i, j) is stored at
/// `j * (cells[0] + 1) + i`, i.e. x runs fastest.
template <typename Scalar>
class GridField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  GridField() = default;

  GridField(Domain<Scalar> domain, Cells cells, Values values)
      : domain_(std::move(domain)), cells_(cells), values_(std::move(values)) {
    domain_.validate();
    if (cells_[0] < 1) throw std::invalid_argument("grid needs at least one cell along x");
    if (domain_.dim == 1) {
      if (cells_[1] != 0) throw std::invalid_argument("1D grid must have zero cells along y");
    } else if (cells_[1] < 1) {
      throw std::invalid_argument("2D grid needs at least one cell along y");
    }
    if (values_.size() != node_count())
      throw std::invalid_argument("value array length does not match the grid");
    if (!values_.allFinite()) throw NumericalError("grid field values must be finite");
  }

  static GridField constant(const Domain<Scalar>& domain, Cells cells, Scalar c) {
    Eigen::Index count = Eigen::Index(cells[0] + 1) * Eigen::Index(cells[1] + 1);
    return GridField(domain, cells, Values::Constant(count, c));
  }

  const Domain<Scalar>& domain() const { return domain_; }
  const Cells& cells() const { return cells_; }
  int dim() const { return domain_.dim; }
  int nodes(int axis) const { return cells_[axis] + 1; }
  Eigen::Index node_count() const { return Eigen::Index(nodes(0)) * Eigen::Index(nodes(1)); }
  Scalar spacing(int axis) const { return domain_.length(axis) / Scalar(cells_[axis]); }
  Scalar cell_measure() const {
    return dim() == 1 ? spacing(0) : spacing(0) * spacing(1);
  }

  const Values& values() const { return values_; }
  Eigen::Index index(int i, int j = 0) const { return Eigen::Index(j) * nodes(0) + i; }
  Scalar value(int i, int j = 0) const { return values_[index(i, j)]; }

  Point<Scalar> node(int i, int j = 0) const {
    Point<Scalar> p;
    p[0] = domain_.lower[0] + Scalar(i) * spacing(0);
    p[1] = dim() == 1 ? Scalar(0) : domain_.lower[1] + Scalar(j) * spacing(1);
    return p;
  }

  bool same_shape(const GridField& other) const {
    return domain_ == other.domain_ && cells_ == other.cells_;
  }

  /// Multilinear interpolation; points outside the domain are clamped.
  Scalar operator()(const Point<Scalar>& point) const {
    if (!std::isfinite(point[0]) || (dim() == 2 && !std::isfinite(point[1])))
      throw NumericalError("grid field evaluated at a non-finite point");
    auto [i, tx] = locate(0, point[0]);
    if (dim() == 1) return (Scalar(1) - tx) * values_[i] + tx * values_[i + 1];
    auto [j, ty] = locate(1, point[1]);
    const Eigen::Index row = nodes(0);
    const Eigen::Index k = Eigen::Index(j) * row + i;
    Scalar lower = (Scalar(1) - tx) * values_[k] + tx * values_[k + 1];
    Scalar upper = (Scalar(1) - tx) * values_[k + row] + tx * values_[k + row + 1];
    return (Scalar(1) - ty) * lower + ty * upper;
  }

  Scalar operator()(Scalar x) const { return (*this)(Point<Scalar>(x, Scalar(0))); }

 private:
  // Cell index and local coordinate in [0, 1]. Coordinates within a few ulps
  // of a node snap onto it so that evaluation at nodes is exact.
  std::pair<int, Scalar> locate(int axis, Scalar x) const {
    const int n = cells_[axis];
    Scalar s = (std::clamp(x, domain_.lower[axis], domain_.upper[axis]) - domain_.lower[axis]) /
               spacing(axis);
    const Scalar r = std::round(s);
    if (std::abs(s - r) <= Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), r))
      s = r;
    int cell = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
    return {cell, s - Scalar(cell)};
  }

  Domain<Scalar> domain_;
  Cells cells_{1, 0};
  Values values_;
};

/// L1 distance by the composite midpoint rule; the cell-centre value of
/// |a - b| comes from the multilinear interpolant of the node differences.
template <typename Scalar>
Scalar l1_distance(const GridField<Scalar>& a, const GridField<Scalar>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("l1_distance: fields differ in shape");
  const auto diff = (a.values() - b.values()).eval();
  const int nx = a.cells()[0];
  Scalar sum(0);
  if (a.dim() == 1) {
    for (int i = 0; i < nx; ++i) sum += std::abs(Scalar(0.5) * (diff[i] + diff[i + 1]));
  } else {
    const int ny = a.cells()[1];
    const Eigen::Index row = a.nodes(0);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Eigen::Index k = Eigen::Index(j) * row + i;
        sum += std::abs(Scalar(0.25) * (diff[k] + diff[k + 1] + diff[k + row] + diff[k + row + 1]));
      }
    }
  }
  return sum * a.cell_measure();
}

/// Discrete total variation. In 2D the axis-summed (anisotropic) variant,
/// with each difference weighted by the trapezoidal transverse cell size.
template <typename Scalar>
Scalar bv_seminorm(const GridField<Scalar>& field) {
  const auto& v = field.values();
  const int nx = field.cells()[0];
  Scalar sum(0);
  if (field.dim() == 1) {
    for (int i = 0; i < nx; ++i) sum += std::abs(v[i + 1] - v[i]);
    return sum;
  }
  const int ny = field.cells()[1];
  const Scalar hx = field.spacing(0), hy = field.spacing(1);
  for (int j = 0; j <= ny; ++j) {
    const Scalar w = (j == 0 || j == ny) ? Scalar(0.5) * hy : hy;
    for (int i = 0; i < nx; ++i) sum += w * std::abs(field.value(i + 1, j) - field.value(i, j));
  }
  for (int i = 0; i <= nx; ++i) {
    const Scalar w = (i == 0 || i == nx) ? Scalar(0.5) * hx : hx;
    for (int j = 0; j < ny; ++j) sum += w * std::abs(field.value(i, j + 1) - field.value(i, j));
  }
  return sum;
}

/// Samples `f` (callable Point -> Scalar) at every grid node.
template <typename Scalar, typename Fn>
GridField<Scalar> sample(Fn&& f, const Domain<Scalar>& domain, Cells cells) {
  auto grid = GridField<Scalar>::constant(domain, cells, Scalar(0));
  typename GridField<Scalar>::Values values(grid.node_count());
  for (int j = 0; j < grid.nodes(1); ++j) {
    for (int i = 0; i < grid.nodes(0); ++i) {
      const Scalar v = f(grid.node(i, j));
      if (!std::isfinite(v)) throw NumericalError("sample: non-finite function value");
      values[grid.index(i, j)] = v;
    }
  }
  return GridField<Scalar>(domain, cells, std::move(values));
}

/// The field composed with a spatial map (callable Point -> Point), sampled
/// on a grid of the requested resolution over the same domain.
template <typename Scalar, typename Map>
GridField<Scalar> pullback(const GridField<Scalar>& field, Map&& map, Cells cells) {
  return sample([&](const Point<Scalar>& p) { return field(map(p)); }, field.domain(), cells);
}

template <typename Scalar, typename Map>
GridField<Scalar> pullback(const GridField<Scalar>& field, Map&& map) {
  return pullback(field, std::forward<Map>(map), field.cells());
}

using Domaind = Domain<double>;
using GridFieldd = GridField<double>;
using Pointd = Point<double>;

}  // namespace tsi
