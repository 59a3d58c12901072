#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "tsi/field.hpp"
#include "tsi/interp.hpp"
#include "tsi/transform.hpp"

namespace tsi {

/// Snapshots u(., eta) at the Lagrange nodes; all on one grid.
template <typename Scalar>
struct SnapshotSet {
  LagrangeSystem<Scalar> system;
  std::vector<GridField<Scalar>> fields;

  SnapshotSet() = default;
  SnapshotSet(LagrangeSystem<Scalar> sys, std::vector<GridField<Scalar>> f)
      : system(std::move(sys)), fields(std::move(f)) {
    if (static_cast<Eigen::Index>(fields.size()) != system.size())
      throw std::invalid_argument("SnapshotSet: one field per node required");
    for (const auto& g : fields)
      if (!g.same_shape(fields.front())) throw std::invalid_argument("SnapshotSet: fields differ in shape");
  }

  const GridField<Scalar>& front() const { return fields.front(); }
};

/// Node data of the inner transforms phi(nu, eta): for every outer node eta
/// an inner Lagrange system over nu and one transform per inner node. The
/// inner node equal to eta (the diagonal) always carries the identity.
template <typename Scalar>
class TransformTable {
 public:
  struct Row {
    LagrangeSystem<Scalar> inner;
    std::vector<Transform<Scalar>> transforms;
    Eigen::Index diagonal = -1;
  };

  TransformTable() = default;

  static TransformTable identity(const LagrangeSystem<Scalar>& outer, const LagrangeSystem<Scalar>& inner,
                                 const Transform<Scalar>& templ) {
    return from_function(outer, inner, [&](Scalar, Scalar) { return identity_like(templ); });
  }

  /// Fills node (nu, eta) with phi(nu, eta); the diagonal is forced to identity.
  template <typename Fn>
  static TransformTable from_function(const LagrangeSystem<Scalar>& outer, const LagrangeSystem<Scalar>& inner,
                                      Fn&& phi) {
    TransformTable table;
    table.outer_ = outer;
    for (Eigen::Index k = 0; k < outer.size(); ++k) {
      Row row;
      row.inner = inner;
      row.diagonal = inner.find_node(outer.node(k));
      for (Eigen::Index v = 0; v < inner.size(); ++v) {
        Transform<Scalar> t = phi(inner.node(v), outer.node(k));
        if (v == row.diagonal) t = identity_like(t);
        row.transforms.push_back(std::move(t));
      }
      table.rows_.push_back(std::move(row));
    }
    table.validate();
    return table;
  }

  void validate() const {
    if (static_cast<Eigen::Index>(rows_.size()) != outer_.size())
      throw std::invalid_argument("TransformTable: one row per outer node required");
    for (const auto& row : rows_) {
      if (static_cast<Eigen::Index>(row.transforms.size()) != row.inner.size())
        throw std::invalid_argument("TransformTable: one transform per inner node required");
      for (const auto& t : row.transforms)
        if (!same_shape(t, rows_.front().transforms.front()))
          throw std::invalid_argument("TransformTable: transforms differ in family or shape");
    }
  }

  const LagrangeSystem<Scalar>& outer() const { return outer_; }
  const Row& row(Eigen::Index k) const { return rows_[k]; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(rows_.size()); }

  /// phi_m(mu, eta_k), interpolated over the inner nodes.
  Transform<Scalar> at(Eigen::Index k, Scalar mu) const {
    const Row& r = rows_[k];
    return interpolate_transform<Scalar>(r.inner, std::span<const Transform<Scalar>>(r.transforms), mu);
  }

  bool is_free(Eigen::Index k, Eigen::Index v) const { return v != rows_[k].diagonal; }

  /// Number of optimizable coefficients (diagonal transforms excluded).
  int free_dof() const {
    int n = 0;
    for (Eigen::Index k = 0; k < size(); ++k)
      for (Eigen::Index v = 0; v < rows_[k].inner.size(); ++v)
        if (is_free(k, v)) n += dof(rows_[k].transforms[v]);
    return n;
  }

  /// Free coefficients concatenated in (outer, inner) lexicographic order.
  Coefficients<Scalar> free_coefficients() const {
    Coefficients<Scalar> c(free_dof());
    Eigen::Index at = 0;
    for_each_free([&](Eigen::Index, Eigen::Index, const Transform<Scalar>& t) {
      const auto tc = coefficients(t);
      c.segment(at, tc.size()) = tc;
      at += tc.size();
    });
    return c;
  }

  TransformTable with_free_coefficients(const Coefficients<Scalar>& c) const {
    if (c.size() != free_dof()) throw std::invalid_argument("TransformTable: coefficient length mismatch");
    TransformTable out = *this;
    Eigen::Index at = 0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      for (Eigen::Index v = 0; v < rows_[k].inner.size(); ++v) {
        if (!is_free(k, v)) continue;
        auto& t = out.rows_[k].transforms[v];
        const int n = dof(t);
        t = from_coefficients(t, Coefficients<Scalar>(c.segment(at, n)));
        at += n;
      }
    }
    return out;
  }

  /// Replaces one node transform; the diagonal cannot be changed.
  void set(Eigen::Index k, Eigen::Index v, Transform<Scalar> t) {
    if (!is_free(k, v)) throw std::invalid_argument("TransformTable: diagonal transforms are fixed to identity");
    if (!same_shape(t, rows_[k].transforms[v])) throw std::invalid_argument("TransformTable: shape mismatch");
    rows_[k].transforms[v] = std::move(t);
  }

  /// Calls f(k, v, transform) for every free node transform in storage order.
  template <typename Fn>
  void for_each_free(Fn&& f) const {
    for (Eigen::Index k = 0; k < size(); ++k)
      for (Eigen::Index v = 0; v < rows_[k].inner.size(); ++v)
        if (is_free(k, v)) f(k, v, rows_[k].transforms[v]);
  }

 private:
  LagrangeSystem<Scalar> outer_;
  std::vector<Row> rows_;
};

/// Pointwise transformed snapshot interpolation
///   x -> sum_eta l_eta(mu) u(phi_m(mu, eta)(x), eta)
/// for any snapshot type callable on points. Without transforms this is
/// plain Lagrange interpolation.
template <typename Scalar, typename Snapshot>
class TsiEvaluator {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TsiEvaluator(std::span<const Snapshot> snapshots, Vector weights, std::vector<Transform<Scalar>> transforms = {})
      : snapshots_(snapshots), weights_(std::move(weights)), transforms_(std::move(transforms)) {
    if (static_cast<Eigen::Index>(snapshots_.size()) != weights_.size())
      throw std::invalid_argument("TsiEvaluator: one weight per snapshot required");
    if (!transforms_.empty() && transforms_.size() != snapshots_.size())
      throw std::invalid_argument("TsiEvaluator: one transform per snapshot required");
  }

  Scalar operator()(const Point<Scalar>& x) const {
    Scalar sum(0);
    for (std::size_t k = 0; k < snapshots_.size(); ++k) {
      const Scalar w = weights_[Eigen::Index(k)];
      if (w == Scalar(0)) continue;
      sum += w * (transforms_.empty() ? snapshots_[k](x) : snapshots_[k](tsi::apply(transforms_[k], x)));
    }
    return sum;
  }

  const Vector& weights() const { return weights_; }
  const std::vector<Transform<Scalar>>& transforms() const { return transforms_; }

 private:
  std::span<const Snapshot> snapshots_;
  Vector weights_;
  std::vector<Transform<Scalar>> transforms_;
};

/// phi_m(mu, eta) for every outer node.
template <typename Scalar>
std::vector<Transform<Scalar>> transforms_at(const TransformTable<Scalar>& table, Scalar mu) {
  std::vector<Transform<Scalar>> out;
  out.reserve(static_cast<std::size_t>(table.size()));
  for (Eigen::Index k = 0; k < table.size(); ++k) out.push_back(table.at(k, mu));
  return out;
}

template <typename Scalar, typename Snapshot>
TsiEvaluator<Scalar, Snapshot> make_tsi_evaluator(const LagrangeSystem<Scalar>& system,
                                                  std::span<const Snapshot> snapshots,
                                                  const TransformTable<Scalar>& table, Scalar mu) {
  return {snapshots, system.basis_values(mu), transforms_at(table, mu)};
}

template <typename Scalar, typename Snapshot>
TsiEvaluator<Scalar, Snapshot> make_plain_evaluator(const LagrangeSystem<Scalar>& system,
                                                    std::span<const Snapshot> snapshots, Scalar mu) {
  return {snapshots, system.basis_values(mu)};
}

template <typename Scalar>
struct Reconstruction {
  GridField<Scalar> field;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  std::vector<Transform<Scalar>> transforms;
};

/// Node-wise Lagrange combination of the snapshots.
template <typename Scalar>
GridField<Scalar> plain_interpolation(const SnapshotSet<Scalar>& snapshots, Scalar mu) {
  const auto l = snapshots.system.basis_values(mu);
  typename GridField<Scalar>::Values v = GridField<Scalar>::Values::Zero(snapshots.front().node_count());
  for (std::size_t k = 0; k < snapshots.fields.size(); ++k) {
    if (l[Eigen::Index(k)] == Scalar(0)) continue;
    v += l[Eigen::Index(k)] * snapshots.fields[k].values();
  }
  return GridField<Scalar>(snapshots.front().domain(), snapshots.front().cells(), std::move(v));
}

/// Transformed snapshot interpolation sampled on a grid over the snapshot
/// domain (default: the snapshot resolution).
template <typename Scalar>
Reconstruction<Scalar> tsi_reconstruct(const SnapshotSet<Scalar>& snapshots, const TransformTable<Scalar>& table,
                                       Scalar mu, std::optional<Cells> cells = std::nullopt) {
  if (table.size() != snapshots.system.size())
    throw std::invalid_argument("tsi_reconstruct: transform table does not match the snapshot nodes");
  auto eval = make_tsi_evaluator<Scalar, GridField<Scalar>>(
      snapshots.system, std::span<const GridField<Scalar>>(snapshots.fields), table, mu);
  auto field = sample(eval, snapshots.front().domain(), cells.value_or(snapshots.front().cells()));
  return {std::move(field), eval.weights(), eval.transforms()};
}

/// Pullback of the closest snapshot (ties toward the smaller node).
template <typename Scalar>
GridField<Scalar> nearest_snapshot(const SnapshotSet<Scalar>& snapshots, const TransformTable<Scalar>& table,
                                   Scalar mu) {
  const auto& nodes = snapshots.system.nodes();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < nodes.size(); ++k)
    if (std::abs(nodes[k] - mu) < std::abs(nodes[best] - mu)) best = k;
  const auto phi = table.at(best, mu);
  return pullback(snapshots.fields[best], [&](const Point<Scalar>& p) { return tsi::apply(phi, p); });
}

/// Options of the adaptive L1 quadrature. A cell is accepted once its
/// refined and coarse Simpson estimates differ by at most
/// `rel_tol * |cell|`, so the error budget is rel_tol times the domain measure.
struct AdaptiveOptions {
  double rel_tol = 1e-5;
  int max_depth = 12;
};

namespace detail {

template <typename Scalar, typename F>
Scalar adapt_1d(F& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb, Scalar whole, int depth,
                const AdaptiveOptions& opt) {
  const Scalar m = Scalar(0.5) * (a + b);
  const Scalar flm = f(Scalar(0.5) * (a + m)), frm = f(Scalar(0.5) * (m + b));
  const Scalar left = (m - a) / Scalar(6) * (fa + Scalar(4) * flm + fm);
  const Scalar right = (b - m) / Scalar(6) * (fm + Scalar(4) * frm + fb);
  const Scalar fine = left + right;
  if (depth >= opt.max_depth || std::abs(fine - whole) <= Scalar(opt.rel_tol) * (b - a)) return fine;
  return adapt_1d(f, a, m, fa, flm, fm, left, depth + 1, opt) + adapt_1d(f, m, b, fm, frm, fb, right, depth + 1, opt);
}

// Values on a 3 x 3 Simpson stencil, v[j][i] with i along x.
template <typename Scalar>
using Stencil = std::array<std::array<Scalar, 3>, 3>;

template <typename Scalar>
Scalar simpson_2d(const Stencil<Scalar>& v, Scalar area) {
  constexpr Scalar w[3] = {Scalar(1), Scalar(4), Scalar(1)};
  Scalar s(0);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) s += w[i] * w[j] * v[j][i];
  return s * area / Scalar(36);
}

template <typename Scalar, typename F>
Scalar adapt_2d(F& f, Scalar x0, Scalar x1, Scalar y0, Scalar y1, const Stencil<Scalar>& coarse, Scalar whole,
                int depth, const AdaptiveOptions& opt) {
  // 5 x 5 grid, reusing the coarse stencil at even positions.
  std::array<std::array<Scalar, 5>, 5> g{};
  const Scalar hx = (x1 - x0) / Scalar(4), hy = (y1 - y0) / Scalar(4);
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) {
      if (i % 2 == 0 && j % 2 == 0)
        g[j][i] = coarse[j / 2][i / 2];
      else
        g[j][i] = f(Point<Scalar>(x0 + Scalar(i) * hx, y0 + Scalar(j) * hy));
    }
  }
  const Scalar quarter = (x1 - x0) * (y1 - y0) / Scalar(4);
  std::array<Stencil<Scalar>, 4> child{};
  std::array<Scalar, 4> part{};
  Scalar fine(0);
  for (int c = 0; c < 4; ++c) {
    const int ox = 2 * (c % 2), oy = 2 * (c / 2);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) child[c][j][i] = g[oy + j][ox + i];
    part[c] = simpson_2d(child[c], quarter);
    fine += part[c];
  }
  if (depth >= opt.max_depth || std::abs(fine - whole) <= Scalar(opt.rel_tol) * Scalar(4) * quarter) return fine;
  const Scalar xm = Scalar(0.5) * (x0 + x1), ym = Scalar(0.5) * (y0 + y1);
  return adapt_2d(f, x0, xm, y0, ym, child[0], part[0], depth + 1, opt) +
         adapt_2d(f, xm, x1, y0, ym, child[1], part[1], depth + 1, opt) +
         adapt_2d(f, x0, xm, ym, y1, child[2], part[2], depth + 1, opt) +
         adapt_2d(f, xm, x1, ym, y1, child[3], part[3], depth + 1, opt);
}

}  // namespace detail

/// L1 distance between two callables on the domain by recursive cell
/// subdivision, starting from the cells of a uniform grid.
template <typename Scalar, typename F, typename G>
Scalar l1_error_adaptive(F&& approx, G&& truth, const Domain<Scalar>& domain, Cells cells,
                         const AdaptiveOptions& opt = {}) {
  auto integrand = [&](const Point<Scalar>& p) {
    const Scalar v = std::abs(approx(p) - truth(p));
    if (!std::isfinite(v)) throw NumericalError("l1_error_adaptive: non-finite integrand");
    return v;
  };
  Scalar total(0);
  if (domain.dim == 1) {
    auto f1 = [&](Scalar x) { return integrand(Point<Scalar>(x, Scalar(0))); };
    const Scalar h = domain.length(0) / Scalar(cells[0]);
    Scalar fa = f1(domain.lower[0]);
    for (int i = 0; i < cells[0]; ++i) {
      const Scalar a = domain.lower[0] + Scalar(i) * h;
      const Scalar b = i + 1 == cells[0] ? domain.upper[0] : a + h;
      const Scalar fm = f1(Scalar(0.5) * (a + b)), fb = f1(b);
      const Scalar whole = (b - a) / Scalar(6) * (fa + Scalar(4) * fm + fb);
      total += detail::adapt_1d(f1, a, b, fa, fm, fb, whole, 0, opt);
      fa = fb;
    }
    return total;
  }
  const Scalar hx = domain.length(0) / Scalar(cells[0]), hy = domain.length(1) / Scalar(cells[1]);
  for (int j = 0; j < cells[1]; ++j) {
    const Scalar y0 = domain.lower[1] + Scalar(j) * hy;
    const Scalar y1 = j + 1 == cells[1] ? domain.upper[1] : y0 + hy;
    for (int i = 0; i < cells[0]; ++i) {
      const Scalar x0 = domain.lower[0] + Scalar(i) * hx;
      const Scalar x1 = i + 1 == cells[0] ? domain.upper[0] : x0 + hx;
      detail::Stencil<Scalar> s{};
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
          s[b][a] = integrand(Point<Scalar>(x0 + Scalar(a) * Scalar(0.5) * (x1 - x0),
                                            y0 + Scalar(b) * Scalar(0.5) * (y1 - y0)));
      const Scalar area = (x1 - x0) * (y1 - y0);
      total += detail::adapt_2d(integrand, x0, x1, y0, y1, s, detail::simpson_2d(s, area), 0, opt);
    }
  }
  return total;
}

/// Adaptive L1 error of a grid reconstruction, starting from its own cells.
template <typename Scalar, typename G>
Scalar l1_error_adaptive(const GridField<Scalar>& reconstruction, G&& truth, const AdaptiveOptions& opt = {}) {
  return l1_error_adaptive(reconstruction, std::forward<G>(truth), reconstruction.domain(), reconstruction.cells(),
                           opt);
}

/// sigma_mu against a sampled truth: grid reconstruction on the truth's
/// grid and the composite midpoint rule.
template <typename Scalar>
Scalar sigma_mu(const SnapshotSet<Scalar>& snapshots, const TransformTable<Scalar>& table,
                const GridField<Scalar>& truth, Scalar mu) {
  if (!(truth.domain() == snapshots.front().domain()))
    throw std::invalid_argument("sigma_mu: truth lives on a different domain");
  return l1_distance(tsi_reconstruct(snapshots, table, mu, truth.cells()).field, truth);
}

/// sigma_mu against an analytic truth: pointwise reconstruction and
/// adaptive quadrature starting from the snapshot cells.
template <typename Scalar, typename Truth>
  requires std::is_invocable_r_v<Scalar, Truth, const Point<Scalar>&>
Scalar sigma_mu(const SnapshotSet<Scalar>& snapshots, const TransformTable<Scalar>& table, Truth&& truth, Scalar mu,
                const AdaptiveOptions& opt = {}) {
  auto eval = make_tsi_evaluator<Scalar, GridField<Scalar>>(
      snapshots.system, std::span<const GridField<Scalar>>(snapshots.fields), table, mu);
  return l1_error_adaptive(eval, std::forward<Truth>(truth), snapshots.front().domain(), snapshots.front().cells(),
                           opt);
}

template <typename Scalar>
struct TrainingPair {
  Scalar mu;
  GridField<Scalar> truth;
};

template <typename Scalar>
struct TrainingError {
  Scalar value;
  Scalar argmax_mu;
};

/// max over the training pairs of sigma_mu, with the maximizing parameter
/// (ties toward the smallest parameter).
template <typename Scalar>
TrainingError<Scalar> sigma_training(const SnapshotSet<Scalar>& snapshots, const TransformTable<Scalar>& table,
                                     std::span<const TrainingPair<Scalar>> training) {
  if (training.empty()) throw std::invalid_argument("sigma_training: empty training set");
  TrainingError<Scalar> best{Scalar(-1), training.front().mu};
  for (const auto& pair : training) {
    const Scalar s = sigma_mu(snapshots, table, pair.truth, pair.mu);
    if (!std::isfinite(s)) throw NumericalError("sigma_training: non-finite training error");
    if (s > best.value || (s == best.value && pair.mu < best.argmax_mu)) best = {s, pair.mu};
  }
  return best;
}

using SnapshotSetd = SnapshotSet<double>;
using TransformTabled = TransformTable<double>;
using Reconstructiond = Reconstruction<double>;
using TrainingPaird = TrainingPair<double>;
using TrainingErrord = TrainingError<double>;

}  // namespace tsi
