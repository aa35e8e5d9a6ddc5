#include "doctest.h"
#include "corpus.hpp"
#include "hadamard/euler.hpp"
#include "hadamard/hadamard_action.hpp"

#include <cmath>
#include <random>

using namespace hadamard;
using namespace hadamard::testing;

namespace {

SmoothFunction monomial(int n) {
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c.back() = 1.0;
  return SmoothFunction(1, {SmoothTerm{1.0, {std::make_shared<PolynomialFactor>(c)}}});
}

EulerPolynomial poly1(std::map<int, double> c) {
  std::map<MultiIndex, double> m;
  for (auto [k, v] : c) m[MultiIndex{k}] = v;
  return EulerPolynomial(1, m);
}

// theta_1 theta_2 + 3
EulerPolynomial mixed2() { return EulerPolynomial(2, {{MultiIndex{1, 1}, 1.0}, {MultiIndex{0, 0}, 3.0}}); }

}  // namespace

TEST_CASE("apply_euler basics") {
  auto phi = TestFunction::bump(Point{1.0}, Point{0.8});
  for (double x : {0.4, 0.9, 1.3}) {
    Point p{x};
    double d1 = phi.derivative(p, MultiIndex{1}), d2 = phi.derivative(p, MultiIndex{2});
    CHECK(apply_euler(EulerPolynomial::theta(1), phi, p) == doctest::Approx(x * d1).epsilon(1e-14));
    CHECK(apply_euler(poly1({{2, 1.0}}), phi, p) == doctest::Approx(x * d1 + x * x * d2).epsilon(1e-13));
    CHECK(apply_euler(EulerPolynomial::constant(1), phi, p) == phi.value(p));
  }
  auto cube = monomial(3);
  for (double x : {-1.5, 0.5, 2.0}) CHECK(apply_euler(poly1({{2, 1.0}}), cube, Point{x}) == doctest::Approx(9 * x * x * x));
}

TEST_CASE("theta_expand examples") {
  auto e2 = theta_expand(MultiIndex{2});
  CHECK(e2 == std::map<MultiIndex, long long>{{MultiIndex{1}, 1}, {MultiIndex{2}, 1}});
  CHECK(theta_expand(MultiIndex{1}) == std::map<MultiIndex, long long>{{MultiIndex{1}, 1}});
  auto e3 = theta_expand(MultiIndex{3});
  CHECK(e3 == std::map<MultiIndex, long long>{{MultiIndex{1}, 1}, {MultiIndex{2}, 3}, {MultiIndex{3}, 1}});
  CHECK(theta_expand(MultiIndex{0}) == std::map<MultiIndex, long long>{{MultiIndex{0}, 1}});
  auto t = theta_expand(MultiIndex{1, 2});
  CHECK(t.size() == 2);
  CHECK(t[(MultiIndex{1, 1})] == 1);
  CHECK(t[(MultiIndex{1, 2})] == 1);
  CHECK_THROWS_AS(theta_expand(MultiIndex{13}), Error);
}

TEST_CASE("theta_expand reproduces n^beta on monomials") {
  // theta^b x^n = n^b x^n and x^k d^k x^n = n(n-1)...(n-k+1) x^n
  for (int b = 0; b <= 12; ++b) {
    auto e = theta_expand(MultiIndex{b});
    for (long long n = 0; n <= 20; ++n) {
      long long lhs = 0, want = 1;
      for (int i = 0; i < b; ++i) want *= n;
      for (auto [g, c] : e) {
        long long ff = 1;
        for (int i = 0; i < g[0]; ++i) ff *= n - i;
        lhs += c * ff;
      }
      CHECK(lhs == want);
    }
  }
}

TEST_CASE("euler_eigenvalue examples") {
  CHECK(euler_eigenvalue(poly1({{2, 1.0}, {0, 3.0}}), MultiIndex{2}) == 7.0);
  CHECK(euler_eigenvalue(EulerPolynomial::constant(2), MultiIndex{4, 1}) == 1.0);
  CHECK(euler_eigenvalue(EulerPolynomial::theta(1), MultiIndex{5}) == 5.0);
  double m = eigenvalue(euler_to_hadamard(EulerPolynomial::theta(1)), MultiIndex{5});
  CHECK(std::fabs(m - 5.0) <= 1e-10);
  CHECK(euler_eigenvalue(mixed2(), MultiIndex{2, 3}) == 9.0);
}

TEST_CASE("monomial identity on a plateau") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(-2, 2), at(1.6, 2.4);
  std::uniform_int_distribution<int> deg(0, 3);
  for (int trial = 0; trial < 8; ++trial) {
    std::map<MultiIndex, double> c;
    for (int i = 0; i < 3; ++i) c[MultiIndex{deg(rng)}] += coef(rng);
    EulerPolynomial p(1, c);
    for (int a = 0; a <= 8; ++a) {
      std::vector<double> mono(static_cast<std::size_t>(a + 1), 0.0);
      mono.back() = 1.0;
      FactorSpec m{FactorSpec::Kind::Polynomial, mono, 0, 1, 0};
      FactorSpec plateau{FactorSpec::Kind::Plateau, {}, 2.0, 1.0, 0.5};
      TestFunction phi(1, {TestTermSpec{1.0, {{m, plateau}}}});
      for (int k = 0; k < 5; ++k) {
        double x = at(rng);
        double want = p.evaluate(MultiIndex{a}) * std::pow(x, a);
        double got = apply_euler(p, phi, Point{x});
        CHECK(std::fabs(got - want) <= 1e-8 * std::max(1.0, std::fabs(want)));
      }
    }
  }
}

TEST_CASE("reversed Euler operator") {
  auto t = transpose(EulerPolynomial::theta(1));
  for (int a = 0; a < 6; ++a) CHECK(t.evaluate(MultiIndex{a}) == -a - 1.0);
  auto t2 = transpose(mixed2());
  // (-a-1)(-b-1) + 3
  CHECK(t2.evaluate(MultiIndex{2, 1}) == 9.0);
}

TEST_CASE("euler_to_hadamard representations") {
  auto id = euler_to_hadamard(EulerPolynomial::constant(1));
  REQUIRE(id.kind() == DistributionKind::PointMassCombo);
  REQUIRE(id.point_mass_combo().terms.size() == 1);
  CHECK(id.point_mass_combo().terms[0].order == MultiIndex{0});
  CHECK(id.point_mass_combo().terms[0].weight == 1.0);

  // theta -> -delta_1 + delta_1'
  auto th = euler_to_hadamard(EulerPolynomial::theta(1));
  std::map<int, double> w;
  for (const auto& t : th.point_mass_combo().terms) {
    CHECK(to_point(t.anchor) == Point{1.0});
    w[t.order[0]] += t.weight;
  }
  CHECK(w == std::map<int, double>{{0, -1.0}, {1, 1.0}});

  auto sq = euler_to_hadamard(poly1({{2, 1.0}}));
  w.clear();
  for (const auto& t : sq.point_mass_combo().terms) w[t.order[0]] += t.weight;
  CHECK(w == std::map<int, double>{{0, 1.0}, {1, -3.0}, {2, 1.0}});
}

TEST_CASE("euler_to_hadamard transpose action is P(-theta-1)") {
  std::vector<EulerPolynomial> ps{EulerPolynomial::theta(1), poly1({{2, 1.0}}), poly1({{3, 0.5}, {1, -2.0}})};
  auto phi = TestFunction::bump(Point{1.3}, Point{0.6});
  for (const auto& p : ps) {
    auto psi = transpose_apply(euler_to_hadamard(p), phi);
    auto q = transpose(p);
    for (double y : {0.8, 1.1, 1.4, 1.7}) {
      double want = apply_euler(q, phi, Point{y});
      CHECK(std::fabs(psi.value(Point{y}) - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST_CASE("round-trip eigenvalues") {
  std::vector<EulerPolynomial> ps1{EulerPolynomial::constant(1), EulerPolynomial::theta(1), poly1({{2, 1.0}})};
  for (const auto& p : ps1) {
    auto t = euler_to_hadamard(p);
    for (int a = 0; a <= 8; ++a) {
      double want = p.evaluate(MultiIndex{a});
      CHECK(std::fabs(eigenvalue(t, MultiIndex{a}) - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
    }
  }
  auto p2 = mixed2();
  auto t2 = euler_to_hadamard(p2);
  for (const auto& a : multi_index_grid(2, 8)) {
    double want = p2.evaluate(a);
    CHECK(std::fabs(eigenvalue(t2, a) - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("polynomial construction") {
  CHECK_THROWS_AS(EulerPolynomial(1, {{MultiIndex{1}, 0.0}}), Error);
  EulerPolynomial p(2, {{MultiIndex{2, 0}, 1.0}, {MultiIndex{0, 3}, 0.0}, {MultiIndex{1, 1}, 2.0}});
  CHECK(p.coeffs().size() == 2);
  CHECK(p.degree() == MultiIndex{2, 1});
}
