#include "doctest.h"
#include "hadamard/quadrature.hpp"
#include "hadamard/types.hpp"

#include <cmath>

using namespace hadamard;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 10, 20}) {
    const auto& r = gauss_legendre(n);
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += r.weights[static_cast<std::size_t>(i)] * std::pow(r.nodes[static_cast<std::size_t>(i)], p);
      double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("adaptive quadrature") {
  CHECK(integrate_adaptive([](double x) { return 1.0 / x; }, 1, 2).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(integrate_adaptive([](double x) { return std::exp(-x); }, 0, 40).value ==
        doctest::Approx(1 - std::exp(-40.0)).epsilon(1e-12));
  CHECK(integrate_adaptive([](double x) { return std::sqrt(x); }, 0, 1).value == doctest::Approx(2.0 / 3).epsilon(1e-10));
  CHECK(integrate_adaptive([](double x) { return x; }, 2, 1).value == doctest::Approx(-1.5));
  CHECK(integrate_adaptive([](double) { return 1.0; }, 1, 1).value == 0.0);
}

TEST_CASE("quadrature failures") {
  QuadratureOptions o;
  o.max_depth = 3;
  o.abs_tol = 1e-14;
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sin(1 / x); }, 1e-6, 1, o), Error);
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1 / x; }, 0, 1), Error);
  CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 0, INFINITY), Error);
}

TEST_CASE("results are reproducible bit for bit") {
  auto f = [](double x) { return std::cos(3 * x) * std::exp(-x * x); };
  double a = integrate_adaptive(f, -3, 5).value, b = integrate_adaptive(f, -3, 5).value;
  CHECK(a == b);
}
