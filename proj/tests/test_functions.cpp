#include "doctest.h"
#include "hadamard/functions.hpp"

#include <cmath>
#include <random>

using namespace hadamard;

namespace {

// Richardson-extrapolated central difference of the (k-1)th derivative.
double fd_derivative(const AxisFunction& f, double x, int k) {
  auto d = [&](double h) { return (f.derivative(x + h, k - 1) - f.derivative(x - h, k - 1)) / (2 * h); };
  double h = 1e-3;
  double d1 = d(h), d2 = d(h / 2), d3 = d(h / 4);
  double r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

}  // namespace

TEST_CASE("bump jet derivatives agree with the closed-form recurrence") {
  BumpFactor b(0.3, 1.7);
  for (double x : {-1.0, -0.5, 0.0, 0.3, 0.9, 1.5}) {
    for (int k = 0; k <= 10; ++k) {
      double a = b.derivative(x, k), p = b.derivative_closed_form(x, k);
      CHECK(std::fabs(a - p) <= 1e-8 * std::max(1.0, std::fabs(a)));
    }
  }
  // frozen high-order values (60-digit reference)
  CHECK(b.derivative(1.95, 16) == doctest::Approx(2.242566633701595e+29).epsilon(1e-12));
  CHECK(b.derivative(-1.2, 12) == doctest::Approx(-937375525920160.26).epsilon(1e-12));
  CHECK(b.derivative(2.0, 0) == 0.0);
  CHECK(b.derivative(-1.4, 3) == 0.0);
}

TEST_CASE("bump derivatives up to order 6 match Richardson finite differences") {
  BumpFactor b(2.0, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.2, 2.8);
  for (int i = 0; i < 100; ++i) {
    double x = u(rng);
    for (int k = 1; k <= 6; ++k) {
      double exact = b.derivative(x, k), fd = fd_derivative(b, x, k);
      CHECK(std::fabs(exact - fd) <= 1e-6 * std::max(std::fabs(exact), 1e-3));
    }
  }
}

TEST_CASE("plateau is flat on the inner interval and vanishes outside") {
  PlateauFactor p(1.0, 0.5, 1.0);
  CHECK(p.value(1.2) == 1.0);
  CHECK(p.derivative(1.4, 3) == 0.0);
  CHECK(p.value(2.0) == 0.0);
  CHECK(p.value(1.7) > 0.0);
  CHECK(p.value(1.7) < 1.0);
  CHECK(p.derivative(1.75, 1) == doctest::Approx(fd_derivative(p, 1.75, 1)).epsilon(1e-6));
  CHECK(p.derivative(0.3, 2) == doctest::Approx(fd_derivative(p, 0.3, 2)).epsilon(1e-6));
}

TEST_CASE("product axis uses Leibniz through jets") {
  auto poly = std::make_shared<PolynomialFactor>(std::vector<double>{0.0, 0.0, 0.0, 1.0});
  auto bump = std::make_shared<BumpFactor>(1.0, 1.0);
  ProductAxis f({poly, bump});
  double x = 1.3;
  // (x^3 B)' = 3x^2 B + x^3 B'
  CHECK(f.derivative(x, 1) == doctest::Approx(3 * x * x * bump->value(x) + x * x * x * bump->derivative(x, 1)));
  CHECK(f.lo() == 0.0);
  CHECK(f.hi() == 2.0);
}

TEST_CASE("dilated axis follows the chain rule") {
  auto bump = std::make_shared<BumpFactor>(1.0, 0.8);
  DilatedAxis d(bump, 0.7, 2);  // x^2 B''(0.7 x)
  for (double x : {0.6, 1.1, 1.9}) {
    CHECK(d.value(x) == doctest::Approx(x * x * bump->derivative(0.7 * x, 2)).epsilon(1e-13));
    CHECK(d.derivative(x, 1) == doctest::Approx(fd_derivative(d, x, 1)).epsilon(1e-6));
    CHECK(d.derivative(x, 3) == doctest::Approx(fd_derivative(d, x, 3)).epsilon(1e-5));
  }
  CHECK(d.lo() == doctest::Approx(0.2 / 0.7));
  CHECK(d.hi() == doctest::Approx(1.8 / 0.7));
}

TEST_CASE("inverse monomial derivatives are falling factorials") {
  InverseMonomialAxis m(3);  // sign(x) x^-3
  CHECK(m.value(2.0) == doctest::Approx(0.125));
  CHECK(m.value(-2.0) == doctest::Approx(0.125));
  CHECK(m.derivative(1.0, 1) == doctest::Approx(-3.0));
  CHECK(m.derivative(1.0, 2) == doctest::Approx(12.0));
}

TEST_CASE("test function support and order checks") {
  auto phi = TestFunction::bump(Point{2.0, -1.0}, Point{1.0, 0.5}, 4);
  CHECK(phi.support().str() == Region(2, {Box({Interval::closed(1, 3), Interval::closed(Rational(-3, 2), Rational(-1, 2))})}).str());
  CHECK(phi.compact());
  CHECK_THROWS_AS(phi.derivative(Point{2.0, -1.0}, MultiIndex{5, 0}), Error);
  try {
    phi.derivative(Point{2.0, -1.0}, MultiIndex{5, 0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnderivableOrder);
  }
  TestTermSpec bad;
  FactorSpec poly;
  poly.kind = FactorSpec::Kind::Polynomial;
  poly.coeffs = {1.0, 1.0};
  bad.factors = {{poly}};
  CHECK_THROWS_AS(TestFunction(1, {bad}), Error);
}

TEST_CASE("dilated test function") {
  auto phi = TestFunction::bump(Point{2.0}, Point{1.0});
  auto d = phi.dilated(Point{0.5});
  CHECK(d.value(Point{4.0}) == phi.value(Point{2.0}));
  CHECK(d.support().str() == Region::from_interval(Interval::closed(2, 6)).str());
}
