#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "tsi/field.hpp"
#include "tsi/interp.hpp"

namespace tsi {

template <typename Scalar>
using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// x -> x + offset, clamped to the domain.
template <typename Scalar>
class ShiftTransform {
 public:
  static constexpr const char* family = "shift";

  ShiftTransform() = default;
  explicit ShiftTransform(Domain<Scalar> domain, Point<Scalar> offset = Point<Scalar>::Zero())
      : domain_(std::move(domain)), offset_(offset) {
    if (domain_.dim == 1) offset_[1] = Scalar(0);
    if (!offset_.allFinite()) throw std::invalid_argument("shift offset must be finite");
  }
  ShiftTransform(Domain<Scalar> domain, Scalar offset)
      : ShiftTransform(std::move(domain), Point<Scalar>(offset, Scalar(0))) {}

  Point<Scalar> operator()(Point<Scalar> p) const {
    p[0] += offset_[0];
    if (domain_.dim == 2) p[1] += offset_[1];
    return domain_.clamp(p);
  }

  const Domain<Scalar>& domain() const { return domain_; }
  const Point<Scalar>& offset() const { return offset_; }
  int dof() const { return domain_.dim; }
  Coefficients<Scalar> coefficients() const { return offset_.head(dof()); }
  ShiftTransform with_coefficients(const Coefficients<Scalar>& c) const {
    if (c.size() != dof()) throw std::invalid_argument("shift: coefficient length mismatch");
    Point<Scalar> off = Point<Scalar>::Zero();
    off.head(dof()) = c;
    return ShiftTransform(domain_, off);
  }
  bool same_shape(const ShiftTransform& o) const { return domain_ == o.domain_; }

 private:
  Domain<Scalar> domain_ = Domain<Scalar>::interval(Scalar(0), Scalar(1));
  Point<Scalar> offset_ = Point<Scalar>::Zero();
};

/// Tensor-monomial degrees of the two perturbation polynomials.
struct PolyDegrees {
  int px = 1, py = 2;  // p(x, y): x-perturbation
  int qx = 2, qy = 0;  // q(x, y): y-perturbation

  int p_terms() const { return (px + 1) * (py + 1); }
  int q_terms() const { return (qx + 1) * (qy + 1); }
  friend bool operator==(const PolyDegrees&, const PolyDegrees&) = default;
};

/// Edge-preserving polynomial map of a rectangle. In reference coordinates
///   phi_x = x + x(1-x) p(x, y),   phi_y = y + y(1-y) q(x, y),
/// so every edge is mapped into itself. With the default degrees phi_x has
/// degree 3 x 2 and phi_y degree 2 x 2.
template <typename Scalar>
class PolyTransform2D {
 public:
  static constexpr const char* family = "poly2d";

  PolyTransform2D() = default;
  explicit PolyTransform2D(Domain<Scalar> domain, PolyDegrees degrees = {}, Coefficients<Scalar> coeffs = {})
      : domain_(std::move(domain)), degrees_(degrees), coeffs_(std::move(coeffs)) {
    if (domain_.dim != 2) throw std::invalid_argument("PolyTransform2D needs a 2D domain");
    if (degrees_.px < 0 || degrees_.py < 0 || degrees_.qx < 0 || degrees_.qy < 0)
      throw std::invalid_argument("PolyTransform2D: negative degree");
    if (coeffs_.size() == 0) coeffs_ = Coefficients<Scalar>::Zero(dof());
    if (coeffs_.size() != dof()) throw std::invalid_argument("PolyTransform2D: coefficient length mismatch");
    if (!coeffs_.allFinite()) throw std::invalid_argument("PolyTransform2D: non-finite coefficient");
  }

  Point<Scalar> operator()(Point<Scalar> p) const {
    const Scalar lx = domain_.length(0), ly = domain_.length(1);
    const Scalar xr = (p[0] - domain_.lower[0]) / lx, yr = (p[1] - domain_.lower[1]) / ly;
    const Scalar pv = poly(0, xr, yr), qv = poly(1, xr, yr);
    p[0] += lx * bubble(xr) * pv;
    p[1] += ly * bubble(yr) * qv;
    return domain_.clamp(p);
  }

  /// det D(phi) at a point, in physical coordinates.
  Scalar jacobian_determinant(const Point<Scalar>& p) const {
    const Scalar lx = domain_.length(0), ly = domain_.length(1);
    const Scalar xr = (p[0] - domain_.lower[0]) / lx, yr = (p[1] - domain_.lower[1]) / ly;
    const Scalar bx = bubble(xr), by = bubble(yr);
    const Scalar dbx = bubble_slope(xr), dby = bubble_slope(yr);
    const Scalar pv = poly(0, xr, yr), qv = poly(1, xr, yr);
    const Scalar a11 = Scalar(1) + dbx * pv + bx * poly_dx(0, xr, yr);
    const Scalar a12 = (lx / ly) * bx * poly_dy(0, xr, yr);
    const Scalar a21 = (ly / lx) * by * poly_dx(1, xr, yr);
    const Scalar a22 = Scalar(1) + dby * qv + by * poly_dy(1, xr, yr);
    return a11 * a22 - a12 * a21;
  }

  const Domain<Scalar>& domain() const { return domain_; }
  const PolyDegrees& degrees() const { return degrees_; }
  int dof() const { return degrees_.p_terms() + degrees_.q_terms(); }
  const Coefficients<Scalar>& coefficients() const { return coeffs_; }
  PolyTransform2D with_coefficients(const Coefficients<Scalar>& c) const {
    return PolyTransform2D(domain_, degrees_, c);
  }
  bool same_shape(const PolyTransform2D& o) const {
    return domain_ == o.domain_ && degrees_ == o.degrees_;
  }

 private:
  static Scalar bubble(Scalar r) { return r * (Scalar(1) - r); }
  static Scalar bubble_slope(Scalar r) { return Scalar(1) - Scalar(2) * r; }

  // which = 0 -> p, 1 -> q. Coefficient of x^a y^b sits at a * (deg_y + 1) + b.
  Scalar poly(int which, Scalar x, Scalar y) const { return eval(which, x, y, 0, 0); }
  Scalar poly_dx(int which, Scalar x, Scalar y) const { return eval(which, x, y, 1, 0); }
  Scalar poly_dy(int which, Scalar x, Scalar y) const { return eval(which, x, y, 0, 1); }

  Scalar eval(int which, Scalar x, Scalar y, int dx, int dy) const {
    const int dgx = which == 0 ? degrees_.px : degrees_.qx;
    const int dgy = which == 0 ? degrees_.py : degrees_.qy;
    const Eigen::Index offset = which == 0 ? 0 : degrees_.p_terms();
    Scalar sum(0);
    for (int a = dx; a <= dgx; ++a) {
      const Scalar fa = dx ? Scalar(a) * ipow(x, a - 1) : ipow(x, a);
      for (int b = dy; b <= dgy; ++b) {
        const Scalar fb = dy ? Scalar(b) * ipow(y, b - 1) : ipow(y, b);
        sum += coeffs_[offset + a * (dgy + 1) + b] * fa * fb;
      }
    }
    return sum;
  }

  static Scalar ipow(Scalar v, int e) {
    Scalar r(1);
    for (int i = 0; i < e; ++i) r *= v;
    return r;
  }

  Domain<Scalar> domain_ = Domain<Scalar>::rectangle(Scalar(0), Scalar(1), Scalar(0), Scalar(1));
  PolyDegrees degrees_;
  Coefficients<Scalar> coeffs_ = Coefficients<Scalar>::Zero(9);
};

/// Piecewise-linear 1D map on uniform knots with pinned endpoints. The free
/// coefficients are the interior ordinate displacements y_k - x_k, so zero
/// coefficients give the identity.
template <typename Scalar>
class MonotoneTransform1D {
 public:
  static constexpr const char* family = "monotone1d";

  MonotoneTransform1D() = default;
  MonotoneTransform1D(Domain<Scalar> domain, int knots, Coefficients<Scalar> interior = {})
      : domain_(std::move(domain)), displacement_(Coefficients<Scalar>::Zero(knots)) {
    if (domain_.dim != 1) throw std::invalid_argument("MonotoneTransform1D needs a 1D domain");
    if (knots < 2) throw std::invalid_argument("MonotoneTransform1D needs at least two knots");
    if (interior.size() == 0) interior = Coefficients<Scalar>::Zero(knots - 2);
    if (interior.size() != knots - 2)
      throw std::invalid_argument("MonotoneTransform1D: coefficient length mismatch");
    if (!interior.allFinite()) throw std::invalid_argument("MonotoneTransform1D: non-finite coefficient");
    displacement_.segment(1, knots - 2) = interior;
  }

  int knot_count() const { return static_cast<int>(displacement_.size()); }
  Scalar knot_spacing() const { return domain_.length(0) / Scalar(knot_count() - 1); }
  Scalar knot(int k) const {
    return k == knot_count() - 1 ? domain_.upper[0] : domain_.lower[0] + Scalar(k) * knot_spacing();
  }
  Scalar ordinate(int k) const { return knot(k) + displacement_[k]; }

  bool strictly_increasing() const {
    for (int k = 0; k + 1 < knot_count(); ++k)
      if (!(ordinate(k) < ordinate(k + 1))) return false;
    return true;
  }

  Scalar operator()(Scalar x) const {
    x = std::clamp(x, domain_.lower[0], domain_.upper[0]);
    const int n = knot_count() - 1;
    const Scalar s = (x - domain_.lower[0]) / knot_spacing();
    const int k = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
    const Scalar t = s - Scalar(k);
    const Scalar d = (Scalar(1) - t) * displacement_[k] + t * displacement_[k + 1];
    return std::clamp(x + d, domain_.lower[0], domain_.upper[0]);
  }

  Point<Scalar> operator()(const Point<Scalar>& p) const { return Point<Scalar>((*this)(p[0]), Scalar(0)); }

  /// Unique x with phi(x) = y.
  Scalar invert(Scalar y) const {
    if (!strictly_increasing()) throw std::domain_error("invert: ordinates are not strictly increasing");
    if (y < domain_.lower[0] || y > domain_.upper[0]) throw std::domain_error("invert: value outside the domain");
    int lo = 0, hi = knot_count() - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (ordinate(mid) <= y ? lo : hi) = mid;
    }
    const Scalar t = (y - ordinate(lo)) / (ordinate(hi) - ordinate(lo));
    return knot(lo) + t * (knot(hi) - knot(lo));
  }

  const Domain<Scalar>& domain() const { return domain_; }
  int dof() const { return knot_count() - 2; }
  Coefficients<Scalar> coefficients() const { return displacement_.segment(1, dof()); }
  MonotoneTransform1D with_coefficients(const Coefficients<Scalar>& c) const {
    return MonotoneTransform1D(domain_, knot_count(), c);
  }
  bool same_shape(const MonotoneTransform1D& o) const {
    return domain_ == o.domain_ && knot_count() == o.knot_count();
  }

 private:
  Domain<Scalar> domain_ = Domain<Scalar>::interval(Scalar(0), Scalar(1));
  Coefficients<Scalar> displacement_ = Coefficients<Scalar>::Zero(2);
};

template <typename Scalar>
using Transform = std::variant<ShiftTransform<Scalar>, PolyTransform2D<Scalar>, MonotoneTransform1D<Scalar>>;

template <typename Scalar>
Point<Scalar> apply(const Transform<Scalar>& t, const Point<Scalar>& p) {
  return std::visit([&](const auto& tr) { return Point<Scalar>(tr(p)); }, t);
}

template <typename Scalar>
int dof(const Transform<Scalar>& t) {
  return std::visit([](const auto& tr) { return tr.dof(); }, t);
}

template <typename Scalar>
Coefficients<Scalar> coefficients(const Transform<Scalar>& t) {
  return std::visit([](const auto& tr) { return Coefficients<Scalar>(tr.coefficients()); }, t);
}

template <typename Scalar>
const char* family_name(const Transform<Scalar>& t) {
  return std::visit([](const auto& tr) { return std::decay_t<decltype(tr)>::family; }, t);
}

template <typename Scalar>
const Domain<Scalar>& transform_domain(const Transform<Scalar>& t) {
  return std::visit([](const auto& tr) -> const Domain<Scalar>& { return tr.domain(); }, t);
}

/// Same family, domain and coefficient layout.
template <typename Scalar>
bool same_shape(const Transform<Scalar>& a, const Transform<Scalar>& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& ta) {
        using T = std::decay_t<decltype(ta)>;
        return ta.same_shape(std::get<T>(b));
      },
      a);
}

/// A transform of the same family and shape as `templ` carrying `c`.
template <typename Scalar>
Transform<Scalar> from_coefficients(const Transform<Scalar>& templ, const Coefficients<Scalar>& c) {
  return std::visit([&](const auto& tr) { return Transform<Scalar>(tr.with_coefficients(c)); }, templ);
}

/// Identity of the same family and shape as `templ`.
template <typename Scalar>
Transform<Scalar> identity_like(const Transform<Scalar>& templ) {
  return from_coefficients(templ, Coefficients<Scalar>(Coefficients<Scalar>::Zero(dof(templ))));
}

/// x-range outside of which coefficient `c` has no effect.
template <typename Scalar>
std::array<Scalar, 2> coefficient_support(const Transform<Scalar>& t, int c) {
  if (const auto* m = std::get_if<MonotoneTransform1D<Scalar>>(&t)) return {m->knot(c), m->knot(c + 2)};
  const auto& d = transform_domain(t);
  return {d.lower[0], d.upper[0]};
}

/// Lagrange combination of node transforms in coefficient space; reproduces
/// the node transform exactly when `mu` is a node.
template <typename Scalar>
Transform<Scalar> interpolate_transform(const LagrangeSystem<Scalar>& system,
                                        std::span<const Transform<Scalar>> nodes, Scalar mu) {
  if (static_cast<Eigen::Index>(nodes.size()) != system.size())
    throw std::invalid_argument("interpolate_transform: one transform per node required");
  for (const auto& t : nodes)
    if (!same_shape(t, nodes.front()))
      throw std::invalid_argument("interpolate_transform: node transforms differ in family or shape");
  if (const auto k = system.find_node(mu); k >= 0) return nodes[k];
  const auto l = system.basis_values(mu);
  Coefficients<Scalar> c = Coefficients<Scalar>::Zero(dof(nodes.front()));
  for (std::size_t i = 0; i < nodes.size(); ++i) c += l[Eigen::Index(i)] * coefficients(nodes[i]);
  return from_coefficients(nodes.front(), c);
}

/// Lazily composed chain of transforms, stored in application order.
template <typename Scalar>
class TransformStack {
 public:
  TransformStack() = default;
  explicit TransformStack(Transform<Scalar> t) { steps_.push_back(std::move(t)); }

  /// outer(inner(x)).
  static TransformStack compose(const TransformStack& outer, const TransformStack& inner) {
    if (!outer.steps_.empty() && !inner.steps_.empty() &&
        !(transform_domain(outer.steps_.front()) == transform_domain(inner.steps_.front())))
      throw std::invalid_argument("compose: transforms act on different domains");
    TransformStack out = inner;
    out.steps_.insert(out.steps_.end(), outer.steps_.begin(), outer.steps_.end());
    return out;
  }

  Point<Scalar> operator()(Point<Scalar> p) const {
    for (const auto& t : steps_) p = tsi::apply(t, p);
    return p;
  }
  Scalar operator()(Scalar x) const { return (*this)(Point<Scalar>(x, Scalar(0)))[0]; }

  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }
  const std::vector<Transform<Scalar>>& steps() const { return steps_; }

 private:
  std::vector<Transform<Scalar>> steps_;
};

template <typename Scalar>
TransformStack<Scalar> compose(const Transform<Scalar>& outer, const Transform<Scalar>& inner) {
  return TransformStack<Scalar>::compose(TransformStack<Scalar>(outer), TransformStack<Scalar>(inner));
}

/// `family,c1,c2,...` with %.17g coefficients.
template <typename Scalar>
std::string to_csv_line(const Transform<Scalar>& t) {
  std::string line = family_name(t);
  const auto c = coefficients(t);
  char buf[40];
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g", static_cast<double>(c[i]));
    line += buf;
  }
  return line;
}

/// Parses a line written by to_csv_line; domain and shape come from `templ`.
template <typename Scalar>
Transform<Scalar> from_csv_line(const std::string& line, const Transform<Scalar>& templ) {
  std::stringstream in(line);
  std::string token;
  std::getline(in, token, ',');
  if (token != family_name(templ))
    throw std::invalid_argument("transform line family '" + token + "' does not match the template");
  std::vector<Scalar> values;
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    values.push_back(static_cast<Scalar>(v));
  }
  Coefficients<Scalar> c(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) c[Eigen::Index(i)] = values[i];
  if (c.size() != dof(templ)) throw std::invalid_argument("transform line has the wrong number of coefficients");
  return from_coefficients(templ, c);
}

using ShiftTransformd = ShiftTransform<double>;
using PolyTransform2Dd = PolyTransform2D<double>;
using MonotoneTransform1Dd = MonotoneTransform1D<double>;
using Transformd = Transform<double>;
using TransformStackd = TransformStack<double>;

}  // namespace tsi
