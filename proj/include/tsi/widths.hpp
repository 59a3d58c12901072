#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tsi {

/// Sampled transport solutions g(x - mu t), g = indicator of [0, inf), on
/// cell centres of a space-time grid (rows) for uniform parameters (columns).
///
/// Every row is a prefix of ones in the column order (u = 1 iff mu <= x / t),
/// so the matrix is stored as the prefix length of each row. Dense access is
/// available for small grids.
struct SnapshotMatrix {
  double x_lo = -0.5, x_hi = 1.5;
  double mu_min = 0.0, mu_max = 1.0;
  int space_cells = 0;
  int time_cells = 0;
  int params = 0;
  std::vector<int> row_counts;     // ones per row, row = j * space_cells + i
  Eigen::VectorXd histogram;       // histogram[c] = rows with c ones, c = 0..params

  Eigen::Index rows() const { return Eigen::Index(row_counts.size()); }
  double mu(int k) const;
  /// Space-time measure of one row.
  double cell_measure() const;
  Eigen::MatrixXd dense() const;
};

/// Requires params >= 2 (or mu_min == mu_max) and positive cell counts.
SnapshotMatrix build_snapshot_matrix(int params, int space_cells, int time_cells, double mu_min = 0.0,
                                     double mu_max = 1.0, double x_lo = -0.5, double x_hi = 1.5);

/// A^T A scaled by the cell measure (the L2 Gram matrix of the columns).
Eigen::MatrixXd gram_matrix(const SnapshotMatrix& m);

struct WidthRow {
  int n = 0;
  double width_l2 = 0.0;        // worst-column L2 residual of the rank-n projection
  double width_l1_worst = 0.0;  // worst column of the best L1 residual over ranks <= n
  double baseline_pwc = 0.0;
};

/// Rows n = 1..n_max. Projections use the leading n principal directions.
/// Requires n_max < params.
std::vector<WidthRow> width_decay(const SnapshotMatrix& m, int n_max);

/// Worst-column L1 distance to the nearest of n columns spread uniformly
/// over the parameter samples. Requires n >= 1.
double piecewise_const_baseline(const SnapshotMatrix& m, int n);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (log n, log value) over n in [n_lo, n_hi].
/// Entries with a nonpositive value are skipped.
SlopeFit fit_loglog(const std::vector<WidthRow>& rows, int n_lo, int n_hi, double WidthRow::*value);

}  // namespace tsi
