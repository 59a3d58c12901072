#include <doctest.h>

#include <cmath>
#include <random>

#include "tsi/models.hpp"
#include "tsi/reconstruct.hpp"

using namespace tsi;
using doctest::Approx;

namespace {
constexpr double below = 1e-12;
}

TEST_CASE("cut-off profiles") {
  CHECK(mollifier_cutoff(1.5, 1.0) == 0.0);
  CHECK(mollifier_cutoff(0.7 - below, 1.0) == Approx(std::exp(-4.0 / 3.0)).epsilon(1e-9));
  CHECK(gaussian_cutoff(1.5, 1.0) == 0.0);
  CHECK(gaussian_cutoff(0.7 - below, 1.0) == Approx(0.4 * std::exp(-1.75)).epsilon(1e-9));
  CHECK(gaussian_cutoff(0.0, 1.0) == Approx(0.4 * std::exp(-7.0)).epsilon(1e-9));
  CHECK(cutoff_jump(1.0) == Approx(0.7));

  SUBCASE("continuation agrees on the domain") {
    for (double x = 0.0; x <= 2.0; x += 0.01) CHECK(gaussian_profile(x, 0.8) == gaussian_cutoff(x, 0.8));
    CHECK(gaussian_profile(-0.1, 0.8) > 0.0);
  }
}

TEST_CASE("burgers 1d") {
  CHECK(burgers1d_backward_char(0.0, 1.0, 1.0) == Approx(-1.0));
  CHECK(burgers1d_backward_char(1.0, 1.0, 1.0) == Approx(1.0));
  CHECK(burgers1d_solution(0.4, 1.0, 1.0) == 1.0);
  CHECK(burgers1d_solution(0.6, 1.0, 1.0) == 0.0);
  CHECK(burgers1d_forward_char(-2.0, 1.0, 1.0) == Approx(-1.0));
  CHECK(burgers1d_forward_char(0.0, 1.0, 1.0) == Approx(0.5));
  CHECK(burgers1d_forward_char(2.0, 1.0, 1.0) == Approx(2.0));

  CHECK(burgers1d_char_transform(0.37, 1.0, 0.8, 0.8) == Approx(0.37));
  CHECK(burgers1d_char_transform(0.3, 1.0, 1.0, 0.5) == Approx(-0.2));
  CHECK(burgers1d_char_transform(0.8, 1.0, 1.0, 0.5) == Approx(0.8));
  CHECK_THROWS_AS(burgers1d_char_transform(0.3, 1.0, 0.5, 1.0), std::domain_error);

  CHECK(burgers1d_shift_transform(0.37, 1.0, 0.8, 0.8) == Approx(0.37));
  CHECK(burgers1d_shift_transform(0.0, 1.0, 1.0, 0.5) == Approx(-0.25));

  SUBCASE("shift aligns shocks: v = (eta / mu) u") {
    for (double mu : {0.6, 1.0, 1.4})
      for (double eta : {0.5, 0.9})
        for (double x = -1.0; x <= 2.0; x += 0.0137) {
          CHECK(burgers1d_solution(burgers1d_shift_transform(x, 1.0, mu, eta), 1.0, eta) ==
                Approx(eta / mu * burgers1d_solution(x, 1.0, mu)));
        }
  }
}

TEST_CASE("burgers 2d") {
  CHECK(burgers2d_exact(0.1, 0.9, 0.45) == Approx(-0.2));
  CHECK(burgers2d_exact(0.1, 0.1, 0.45) == Approx(0.5));
  CHECK(burgers2d_exact(0.95, 0.1, 0.45) == Approx(0.8));
  CHECK_THROWS_AS(burgers2d_exact(0.5, 0.5, 0.0), std::domain_error);

  SUBCASE("values stay within the initial states") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0), t(0.3, 0.5);
    for (int k = 0; k < 2000; ++k) {
      const double v = burgers2d_exact(u(rng), u(rng), t(rng));
      CHECK(v >= -1.0);
      CHECK(v <= 0.8);
    }
  }
}

TEST_CASE("two boxes") {
  CHECK(two_boxes(1.3 + 0.5, 1.3) == 1.0);
  CHECK(two_boxes(1.3 + 2.0, 1.3) == 0.0);
  CHECK(two_boxes(1.3 + 4.0, 1.3) == 1.0);
  CHECK(two_boxes(1.3 + 5.0, 1.3) == 0.0);
}

TEST_CASE("model registry and exact shifts") {
  for (const auto& id : model_ids()) {
    const auto m = make_model(id);
    CHECK(m.id == id);
    CHECK(m.mu_min < m.mu_max);
    CHECK(std::isfinite(m(Pointd(m.domain.lower[0], m.domain.lower[1]), m.mu_min)));
  }
  CHECK_THROWS_AS(make_model("heat"), std::invalid_argument);
  CHECK_THROWS_AS(exact_shift(make_model("burgers2d"), 0.4, 0.3), std::invalid_argument);

  const auto g = make_model("gaussian1d");
  CHECK(exact_shift(g, 0.9, 0.9).offset()[0] == 0.0);
  const auto s = exact_shift(g, 1.0, 0.5);
  // The shifted eta-snapshot has its jump at j(mu).
  const double j = cutoff_jump(1.0);
  CHECK(g(s(Pointd(j - 1e-9, 0.0)), 0.5) > 0.0);
  CHECK(g(s(Pointd(j + 1e-9, 0.0)), 0.5) == 0.0);
}

TEST_CASE("exact-shift interpolation") {
  const auto g = make_model("gaussian1d");
  const auto sys = chebyshev_nodes(5, g.mu_min, g.mu_max);
  for (Eigen::Index k = 0; k < sys.size(); ++k)
    for (double x : {0.1, 0.5, 0.9, 1.7})
      CHECK(exact_shift_tsi(g, sys, sys.node(k), Pointd(x, 0.0)) == Approx(g(Pointd(x, 0.0), sys.node(k))));
}

TEST_CASE("snapshot resolution error") {
  const auto g = make_model("gaussian1d");
  const auto snap = sample(g.at(1.0), g.domain, Cells{200, 0});
  const auto fine = sample(g.at(1.0), g.domain, Cells{20000, 0});
  const auto coarse_on_fine = pullback(snap, [](const Pointd& p) { return p; }, fine.cells());
  const double err = l1_distance(coarse_on_fine, fine);
  CHECK(err > 3.5e-4 / 3.0);
  CHECK(err < 3.5e-4 * 3.0);
}
