#include <doctest.h>

#include <cmath>
#include <random>

#include "tsi/interp.hpp"

using namespace tsi;
using doctest::Approx;

TEST_CASE("lagrange basis") {
  const auto sys = uniform_nodes(2, 0.0, 1.0);
  CHECK(sys.basis(0, 0.25) == Approx(0.75));
  CHECK(sys.basis(0, 0.0) == 1.0);
  CHECK(sys.basis(0, 1.0) == 0.0);
  CHECK_THROWS_AS(sys.basis(2, 0.5), std::out_of_range);

  const auto five = chebyshev_nodes(5, -2.0, 3.0);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) CHECK(five.basis(i, five.node(j)) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("node sets") {
  const auto u = uniform_nodes(3, 0.0, 1.0);
  CHECK(u.node(0) == 0.0);
  CHECK(u.node(1) == Approx(0.5));
  CHECK(u.node(2) == 1.0);
  CHECK(chebyshev_nodes(1, -1.0, 1.0).node(0) == Approx(0.0));
  const auto c2 = chebyshev_nodes(2, -1.0, 1.0);
  CHECK(c2.node(0) == Approx(-std::sqrt(0.5)));
  CHECK(c2.node(1) == Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(uniform_nodes(0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(chebyshev_nodes(0, 0.0, 1.0), std::invalid_argument);

  Eigen::VectorXd repeated(2);
  repeated << 0.5, 0.5;
  CHECK_THROWS_AS(LagrangeSystemd(repeated, 0.0, 1.0), std::invalid_argument);
  Eigen::VectorXd outside(1);
  outside << 2.0;
  CHECK_THROWS_AS(LagrangeSystemd(outside, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("interpolate scalar") {
  const auto sys = uniform_nodes(2, 0.0, 1.0);
  Eigen::VectorXd v(2);
  v << 0.0, 2.0;
  CHECK(interpolate_scalar(sys, v, 0.25) == Approx(0.5));
  CHECK(interpolate_scalar(sys, v, 1.0) == 2.0);
  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(interpolate_scalar(sys, wrong, 0.5), std::invalid_argument);

  const auto c = uniform_nodes(6, -1.0, 2.0);
  CHECK(interpolate_scalar(c, Eigen::VectorXd::Constant(6, 4.5), 0.123) == Approx(4.5));
}

TEST_CASE("partition of unity and polynomial reproduction") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> mu(0.0, 1.0);
  for (int n = 1; n <= 12; ++n) {
    for (const auto& sys : {uniform_nodes(n, 0.0, 1.0), chebyshev_nodes(n, 0.0, 1.0)}) {
      for (int s = 0; s < 50; ++s) {
        const double m = mu(rng);
        CHECK(std::abs(sys.basis_values(m).sum() - 1.0) <= 1e-12);
        for (int k = 0; k < n; ++k) {
          Eigen::VectorXd values(n);
          for (int i = 0; i < n; ++i) values[i] = std::pow(sys.node(i), k);
          CHECK(std::abs(interpolate_scalar(sys, values, m) - std::pow(m, k)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("lebesgue constant") {
  CHECK(lebesgue_constant(uniform_nodes(1, 0.0, 1.0)) == Approx(1.0));
  CHECK(lebesgue_constant(uniform_nodes(2, 0.0, 1.0)) == Approx(1.0));
  CHECK(lebesgue_constant(uniform_nodes(3, 0.0, 1.0)) == Approx(1.25).epsilon(1e-6));
  const auto sys = uniform_nodes(7, 0.0, 1.0);
  double last = 0.0;
  for (int samples : {2, 11, 101, 1001, 10001}) {
    const double l = lebesgue_constant(sys, samples);
    CHECK(l >= 1.0);
    CHECK(l >= last - 1e-15);
    last = l;
  }
  // Chebyshev nodes grow far slower than uniform ones.
  CHECK(lebesgue_constant(chebyshev_nodes(12, 0.0, 1.0)) < 0.1 * lebesgue_constant(uniform_nodes(12, 0.0, 1.0)));
}
