#include "tsi/widths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsi/field.hpp"

namespace tsi {

double SnapshotMatrix::mu(int k) const {
  return params == 1 ? mu_min : mu_min + (mu_max - mu_min) * double(k) / double(params - 1);
}

double SnapshotMatrix::cell_measure() const {
  return (x_hi - x_lo) / double(space_cells) / double(time_cells);
}

Eigen::MatrixXd SnapshotMatrix::dense() const {
  Eigen::MatrixXd a(rows(), params);
  for (Eigen::Index r = 0; r < rows(); ++r)
    for (int k = 0; k < params; ++k) a(r, k) = k < row_counts[std::size_t(r)] ? 1.0 : 0.0;
  return a;
}

SnapshotMatrix build_snapshot_matrix(int params, int space_cells, int time_cells, double mu_min, double mu_max,
                                     double x_lo, double x_hi) {
  if (space_cells < 1 || time_cells < 1) throw std::invalid_argument("build_snapshot_matrix: cell counts must be >= 1");
  if (params < 1 || (params < 2 && mu_min != mu_max))
    throw std::invalid_argument("build_snapshot_matrix: at least two parameter samples required");
  if (!(mu_min <= mu_max) || !(x_lo < x_hi)) throw std::invalid_argument("build_snapshot_matrix: empty interval");

  SnapshotMatrix m;
  m.x_lo = x_lo;
  m.x_hi = x_hi;
  m.mu_min = mu_min;
  m.mu_max = mu_max;
  m.space_cells = space_cells;
  m.time_cells = time_cells;
  m.params = params;
  m.row_counts.resize(std::size_t(space_cells) * std::size_t(time_cells));
  m.histogram = Eigen::VectorXd::Zero(params + 1);

  const double dx = (x_hi - x_lo) / space_cells;
  const double dt = 1.0 / time_cells;
  for (int j = 0; j < time_cells; ++j) {
    const double t = (j + 0.5) * dt;
    for (int i = 0; i < space_cells; ++i) {
      const double x = x_lo + (i + 0.5) * dx;
      // mu_k t is increasing in k, so the ones form a prefix.
      int lo = 0, hi = params;
      while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (x - m.mu(mid) * t >= 0.0) lo = mid + 1;
        else hi = mid;
      }
      m.row_counts[std::size_t(j) * std::size_t(space_cells) + std::size_t(i)] = lo;
      m.histogram[lo] += 1.0;
    }
  }
  return m;
}

namespace {

// tail[k] = rows whose prefix covers column k.
Eigen::VectorXd column_support(const SnapshotMatrix& m) {
  Eigen::VectorXd tail(m.params);
  double acc = 0.0;
  for (int k = m.params - 1; k >= 0; --k) {
    acc += m.histogram[k + 1];
    tail[k] = acc;
  }
  return tail;
}

struct ColumnResidual {
  double l1 = 0.0;
  double l2 = 0.0;
};

// Residual of column j minus A w, where (A w)_r = sum_{k < count_r} w_k.
ColumnResidual residual(const SnapshotMatrix& m, int j, const Eigen::VectorXd& w) {
  ColumnResidual out;
  double prefix = 0.0;
  for (int c = 0; c <= m.params; ++c) {
    if (c > 0) prefix += w[c - 1];
    const double h = m.histogram[c];
    if (h == 0.0) continue;
    const double r = (j < c ? 1.0 : 0.0) - prefix;
    out.l1 += h * std::abs(r);
    out.l2 += h * r * r;
  }
  const double da = m.cell_measure();
  out.l1 *= da;
  out.l2 = std::sqrt(out.l2 * da);
  return out;
}

}  // namespace

Eigen::MatrixXd gram_matrix(const SnapshotMatrix& m) {
  const Eigen::VectorXd tail = column_support(m);
  Eigen::MatrixXd g(m.params, m.params);
  for (int j = 0; j < m.params; ++j)
    for (int k = 0; k < m.params; ++k) g(j, k) = tail[std::max(j, k)];
  return g * m.cell_measure();
}

std::vector<WidthRow> width_decay(const SnapshotMatrix& m, int n_max) {
  if (n_max < 1 || n_max >= m.params) throw std::invalid_argument("width_decay: need 1 <= n_max < parameter count");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_matrix(m));
  if (eig.info() != Eigen::Success) throw NumericalError("width_decay: eigen decomposition failed");

  // Eigenvalues ascend; the projector onto the leading n directions grows by
  // one rank-one term per n.
  Eigen::MatrixXd projector = Eigen::MatrixXd::Zero(m.params, m.params);
  // The subspaces are nested, so a column's L1 distance to the n-th one is
  // bounded by its best residual over all m <= n.
  Eigen::VectorXd best_l1 = Eigen::VectorXd::Constant(m.params, std::numeric_limits<double>::infinity());
  std::vector<WidthRow> rows;
  rows.reserve(std::size_t(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const Eigen::VectorXd v = eig.eigenvectors().col(m.params - n);
    projector.noalias() += v * v.transpose();
    WidthRow row;
    row.n = n;
    for (int j = 0; j < m.params; ++j) {
      const auto r = residual(m, j, projector.col(j));
      best_l1[j] = std::min(best_l1[j], r.l1);
      row.width_l1_worst = std::max(row.width_l1_worst, best_l1[j]);
      row.width_l2 = std::max(row.width_l2, r.l2);
    }
    row.baseline_pwc = piecewise_const_baseline(m, n);
    rows.push_back(row);
  }
  return rows;
}

double piecewise_const_baseline(const SnapshotMatrix& m, int n) {
  if (n < 1) throw std::invalid_argument("piecewise_const_baseline: n must be >= 1");
  const int count = m.params;
  std::vector<int> chosen;
  for (int i = 0; i < n; ++i) {
    const double pos = (i + 0.5) * double(count) / double(n) - 0.5;
    chosen.push_back(std::clamp(int(std::lround(pos)), 0, count - 1));
  }
  // cumulative[c] = rows with fewer than c ones.
  Eigen::VectorXd cumulative(count + 2);
  cumulative[0] = 0.0;
  for (int c = 0; c <= count; ++c) cumulative[c + 1] = cumulative[c] + m.histogram[c];

  double worst = 0.0;
  for (int j = 0; j < count; ++j) {
    int best = chosen.front();
    for (int k : chosen)
      if (std::abs(k - j) < std::abs(best - j)) best = k;
    const int lo = std::min(j, best), hi = std::max(j, best);
    // Columns lo and hi differ on rows with lo < count <= hi.
    worst = std::max(worst, cumulative[hi + 1] - cumulative[lo + 1]);
  }
  return worst * m.cell_measure();
}

SlopeFit fit_loglog(const std::vector<WidthRow>& rows, int n_lo, int n_hi, double WidthRow::*value) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.n < n_lo || r.n > n_hi || !(r.*value > 0.0)) continue;
    const double x = std::log(double(r.n)), y = std::log(r.*value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("fit_loglog: fewer than two usable points");
  const double denom = count * sxx - sx * sx;
  SlopeFit fit;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  return fit;
}

}  // namespace tsi
