#include <doctest.h>

#include <random>

#include "tsi/transform.hpp"

using namespace tsi;
using doctest::Approx;

namespace {

const Domaind unit = Domaind::interval(0.0, 1.0);
const Domaind square = Domaind::rectangle(0.0, 1.0, 0.0, 1.0);

Coefficients<double> random_coefficients(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Coefficients<double> c(n);
  for (int k = 0; k < n; ++k) c[k] = u(rng);
  return c;
}

}  // namespace

TEST_CASE("zero coefficients give the identity") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Transformd families[] = {ShiftTransformd(unit), ShiftTransformd(square), PolyTransform2Dd(square),
                                 MonotoneTransform1Dd(unit, 11)};
  for (const auto& t : families) {
    const auto id = identity_like(t);
    for (int k = 0; k < 100; ++k) {
      const Pointd p(u(rng), transform_domain(t).dim == 2 ? u(rng) : 0.0);
      CHECK((tsi::apply(id, p) - p).norm() == 0.0);
    }
  }
}

TEST_CASE("shift transform") {
  CHECK(ShiftTransformd(unit, 0.25)(Pointd(0.5, 0.0))[0] == Approx(0.75));
  CHECK(ShiftTransformd(unit, 0.25)(Pointd(0.9, 0.0))[0] == 1.0);
  CHECK(ShiftTransformd(unit).dof() == 1);
  CHECK(ShiftTransformd(square).dof() == 2);
  CHECK_THROWS_AS(ShiftTransformd(unit, std::nan("")), std::invalid_argument);
}

TEST_CASE("polynomial transform") {
  const PolyTransform2Dd id(square);
  CHECK(id.dof() == 9);
  Coefficients<double> c = Coefficients<double>::Zero(9);
  c[0] = 0.8;  // constant term of the x displacement
  const PolyTransform2Dd p(square, PolyDegrees{}, c);
  CHECK(p(Pointd(0.5, 0.3))[0] == Approx(0.5 + 0.25 * 0.8));
  CHECK(p(Pointd(0.5, 0.3))[1] == Approx(0.3));

  SUBCASE("edges are preserved") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      const PolyTransform2Dd t(square, PolyDegrees{}, random_coefficients(rng, 9, 2.0));
      for (double s = 0.0; s <= 1.0; s += 0.125) {
        CHECK(t(Pointd(0.0, s))[0] == Approx(0.0));
        CHECK(t(Pointd(1.0, s))[0] == Approx(1.0));
        CHECK(t(Pointd(s, 0.0))[1] == Approx(0.0));
        CHECK(t(Pointd(s, 1.0))[1] == Approx(1.0));
      }
    }
  }
  SUBCASE("jacobian matches finite differences") {
    std::mt19937 rng(10);
    const PolyTransform2Dd t(square, PolyDegrees{}, random_coefficients(rng, 9, 0.5));
    const Pointd x(0.3, 0.6);
    const double h = 1e-6;
    const Pointd dx = (t(Pointd(x[0] + h, x[1])) - t(Pointd(x[0] - h, x[1]))) / (2 * h);
    const Pointd dy = (t(Pointd(x[0], x[1] + h)) - t(Pointd(x[0], x[1] - h))) / (2 * h);
    CHECK(t.jacobian_determinant(x) == Approx(dx[0] * dy[1] - dx[1] * dy[0]).epsilon(1e-6));
  }
  CHECK_THROWS_AS(PolyTransform2Dd(Domaind::interval(0, 1)), std::invalid_argument);
}

TEST_CASE("monotone transform") {
  const MonotoneTransform1Dd m(unit, 11);
  CHECK(m.dof() == 9);
  for (double y : {0.0, 0.33, 1.0}) CHECK(m.invert(y) == Approx(y));

  Coefficients<double> mid(1);
  mid << 0.1;
  const MonotoneTransform1Dd bent(unit, 3, mid);
  CHECK(bent.ordinate(1) == Approx(0.6));
  CHECK(bent.invert(0.6) == Approx(0.5));
  CHECK_THROWS_AS(bent.invert(1.5), std::domain_error);

  Coefficients<double> fold(1);
  fold << 0.6;
  CHECK_THROWS_AS(MonotoneTransform1Dd(unit, 3, fold).invert(0.5), std::domain_error);
  CHECK_THROWS_AS(MonotoneTransform1Dd(unit, 1), std::invalid_argument);

  SUBCASE("apply then invert") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MonotoneTransform1Dd t(unit, 11, random_coefficients(rng, 9, 0.04));
    REQUIRE(t.strictly_increasing());
    for (int k = 0; k < 200; ++k) {
      const double x = u(rng);
      CHECK(std::abs(t.invert(t(x)) - x) <= 1e-12);
    }
  }
}

TEST_CASE("composition") {
  const Transformd a = ShiftTransformd(Domaind::interval(0.0, 10.0), 0.5);
  const Transformd b = ShiftTransformd(Domaind::interval(0.0, 10.0), 1.25);
  const auto ab = compose(a, b);
  CHECK(ab.size() == 2);
  CHECK(ab(3.0) == Approx(4.75));

  // compose(outer, inner) applies inner first.
  Coefficients<double> c(1);
  c << 0.2;
  const Transformd bend = MonotoneTransform1Dd(unit, 3, c);
  const Transformd shift = ShiftTransformd(unit, 0.1);
  const auto outer_bend = compose(bend, shift);
  CHECK(outer_bend(0.2) == Approx(tsi::apply(bend, Pointd(0.3, 0.0))[0]));

  SUBCASE("monotone maps compose to monotone maps") {
    std::mt19937 rng(13);
    const Transformd p = MonotoneTransform1Dd(unit, 11, random_coefficients(rng, 9, 0.04));
    const Transformd q = MonotoneTransform1Dd(unit, 7, random_coefficients(rng, 5, 0.06));
    auto stack = compose(p, q);
    stack = TransformStackd::compose(TransformStackd(p), stack);
    CHECK(stack.size() == 3);
    double last = -1.0;
    for (int k = 0; k <= 10000; ++k) {
      const double y = stack(k / 10000.0);
      CHECK(y > last);
      last = y;
    }
  }
  CHECK(TransformStackd().empty());
  CHECK(TransformStackd()(0.4) == 0.4);
}

TEST_CASE("transform interpolation") {
  const auto sys = uniform_nodes(2, 0.0, 1.0);
  const std::vector<Transformd> shifts{ShiftTransformd(unit, 0.0), ShiftTransformd(unit, 1.0)};
  const auto t = interpolate_transform(sys, std::span<const Transformd>(shifts), 0.3);
  CHECK(coefficients(t)[0] == Approx(0.3));

  std::mt19937 rng(14);
  const auto five = chebyshev_nodes(5, 0.0, 1.0);
  std::vector<Transformd> nodes;
  for (int k = 0; k < 5; ++k) nodes.push_back(PolyTransform2Dd(square, PolyDegrees{}, random_coefficients(rng, 9, 1.0)));
  for (int k = 0; k < 5; ++k)
    CHECK((coefficients(interpolate_transform(five, std::span<const Transformd>(nodes), five.node(k))) -
           coefficients(nodes[k]))
              .norm() <= 1e-13);
  const std::vector<Transformd> same(5, nodes[2]);
  CHECK((coefficients(interpolate_transform(five, std::span<const Transformd>(same), 0.77)) - coefficients(nodes[2]))
            .norm() <= 1e-13);
  CHECK_THROWS_AS(interpolate_transform(five, std::span<const Transformd>(shifts), 0.5), std::invalid_argument);
}

TEST_CASE("coefficient serialization") {
  std::mt19937 rng(15);
  const Transformd families[] = {ShiftTransformd(square, Pointd(0.1, -0.3)),
                                 PolyTransform2Dd(square, PolyDegrees{}, random_coefficients(rng, 9, 1.0)),
                                 MonotoneTransform1Dd(unit, 11, random_coefficients(rng, 9, 0.04))};
  for (const auto& t : families) {
    const auto back = from_csv_line(to_csv_line(t), identity_like(t));
    CHECK(same_shape(back, t));
    CHECK((coefficients(back) - coefficients(t)).norm() == 0.0);
  }
  CHECK_THROWS(from_csv_line(std::string("poly2d,1,2"), families[0]));
  CHECK_THROWS(from_csv_line(std::string("shift,0.1"), families[0]));
}
