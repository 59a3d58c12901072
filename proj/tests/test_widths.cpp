#include <doctest.h>

#include <cmath>

#include "tsi/widths.hpp"

using namespace tsi;
using doctest::Approx;

TEST_CASE("snapshot matrix") {
  const auto m = build_snapshot_matrix(9, 16, 8);
  const Eigen::MatrixXd a = m.dense();
  CHECK(a.rows() == 16 * 8);
  CHECK(a.cols() == 9);
  CHECK(m.histogram.sum() == Approx(double(m.rows())));
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    // Ones form a prefix: u = 1 iff mu <= x / t.
    for (Eigen::Index c = 1; c < a.cols(); ++c) CHECK(a(r, c) <= a(r, c - 1));
    CHECK(a.row(r).sum() == m.row_counts[std::size_t(r)]);
  }
  CHECK(m.mu(0) == 0.0);
  CHECK(m.mu(8) == 1.0);
  CHECK(m.cell_measure() == Approx(2.0 / 16 * 1.0 / 8));

  const Eigen::MatrixXd gram = gram_matrix(m);
  CHECK((gram - a.transpose() * a * m.cell_measure()).norm() <= 1e-12);

  CHECK_THROWS_AS(build_snapshot_matrix(1, 16, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_snapshot_matrix(9, 0, 8), std::invalid_argument);
}

TEST_CASE("width decay") {
  const auto m = build_snapshot_matrix(65, 128, 128);
  const auto rows = width_decay(m, 32);
  REQUIRE(rows.size() == 32);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].n == int(k) + 1);
    CHECK(rows[k].width_l2 >= 0.0);
    if (k > 0) {
      CHECK(rows[k].width_l2 <= rows[k - 1].width_l2 + 1e-12);
      CHECK(rows[k].width_l1_worst <= rows[k - 1].width_l1_worst + 1e-12);
    }
  }
  CHECK_THROWS_AS(width_decay(m, 65), std::invalid_argument);
}

TEST_CASE("piecewise-constant baseline") {
  const auto m = build_snapshot_matrix(33, 64, 64);
  CHECK(piecewise_const_baseline(m, 33) == 0.0);
  // Dense reference: worst column distance to the nearest chosen column.
  const Eigen::MatrixXd a = m.dense();
  for (int n : {1, 3, 8}) {
    std::vector<int> chosen;
    for (int i = 0; i < n; ++i) chosen.push_back(int(std::lround((i + 0.5) * 33.0 / n - 0.5)));
    double worst = 0.0;
    for (int c = 0; c < 33; ++c) {
      int best = chosen.front();
      for (int k : chosen)
        if (std::abs(k - c) < std::abs(best - c)) best = k;
      worst = std::max(worst, (a.col(c) - a.col(best)).cwiseAbs().sum() * m.cell_measure());
    }
    CHECK(piecewise_const_baseline(m, n) == Approx(worst));
  }
  CHECK_THROWS_AS(piecewise_const_baseline(m, 0), std::invalid_argument);
}

TEST_CASE("log-log fit") {
  std::vector<WidthRow> rows;
  for (int n = 1; n <= 16; ++n) rows.push_back({n, 0.0, 3.0 * std::pow(n, -1.5), n == 5 ? 0.0 : 1.0});
  const auto fit = fit_loglog(rows, 2, 16, &WidthRow::width_l1_worst);
  CHECK(fit.slope == Approx(-1.5));
  CHECK(fit.intercept == Approx(std::log(3.0)));
  CHECK(fit_loglog(rows, 1, 16, &WidthRow::baseline_pwc).slope == Approx(0.0));
}
