#pragma once

// Distributions and test functions shared by the unit and acceptance suites.

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hadamard/distribution.hpp"
#include "hadamard/functions.hpp"
#include "hadamard/quadrature.hpp"

namespace hadamard::testing {

inline Region box_region(int d, const char* side) {
  std::vector<Interval> s(static_cast<std::size_t>(d), Interval::parse(side));
  return Region::from_box(Box(s));
}

/// 1 on a closed box [lo, hi]^d.
inline DistributionRep unit_density(int d, const char* side = "[1,2]") {
  return DistributionRep::density(Density::indicator(box_region(d, side)));
}

/// exp(-x) on [1, inf), tagged rapid.
inline DistributionRep exp_tail() {
  return DistributionRep::density(
      Density::on_region(1.0, {std::make_shared<ExpKernel>(1.0)}, box_region(1, "[1,inf)"), DecayClass::rapid()));
}

/// theta_1 (1 on [1,2]^d).
inline DistributionRep theta_density(int d) {
  MultiIndex beta(d);
  beta[0] = 1;
  return DistributionRep::euler(d, {EulerTerm{beta, Density::indicator(box_region(d, "[1,2]"))}});
}

struct NamedDistribution {
  std::string name;
  DistributionRep t;
};

/// Eigen-residual battery in dimension d.
inline std::vector<NamedDistribution> battery(int d) {
  std::vector<NamedDistribution> out;
  const double anchors[] = {-2.0, -0.5, 0.5, 2.0};
  // every anchor in {+-0.5, +-2}^d
  int count = 1;
  for (int j = 0; j < d; ++j) count *= 4;
  for (int i = 0; i < count; ++i) {
    Point a(d);
    int r = i;
    for (int j = 0; j < d; ++j) {
      a[j] = anchors[r % 4];
      r /= 4;
    }
    std::string name = "delta(";
    for (int j = 0; j < d; ++j) name += (j ? "," : "") + std::to_string(a[j]).substr(0, 4);
    out.push_back({name + ")", DistributionRep::delta(a)});
  }
  if (d == 1) out.push_back({"delta'(1)", DistributionRep::delta(Point{1.0}, MultiIndex{1})});
  {
    std::vector<PointMass> pm;
    MultiIndex z(d), o(d, 1), e(d);
    e[0] = 2;
    pm.push_back({to_rpoint(Point::ones(d)), z, 2.0});
    pm.push_back({to_rpoint(Point::ones(d)), o, -0.5});
    pm.push_back({to_rpoint(Point::ones(d)), e, 0.25});
    out.push_back({"combo(1)", DistributionRep::point_masses(d, pm)});
  }
  out.push_back({"one[1,2]", unit_density(d)});
  out.push_back({"theta.one[1,2]", theta_density(d)});
  return out;
}

/// Three bumps inside (0.3, 3.5)^d, drawn from the seed.
inline std::vector<TestFunction> random_bumps(int d, std::uint64_t seed, int count = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(0.8, 2.6), r(0.3, 0.7);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    Point cen(d), rad(d);
    for (int j = 0; j < d; ++j) {
      cen[j] = c(rng);
      rad[j] = r(rng);
    }
    out.push_back(TestFunction::bump(cen, rad));
  }
  return out;
}

/// Composite fixed-order Gauss-Legendre on [a, b]: an oracle that shares no
/// subdivision logic with the adaptive integrator.
inline double fixed_gauss(const std::function<double(double)>& f, double a, double b, int panels = 256,
                          int order = 20) {
  const auto& rule = gauss_legendre(order);
  double h = (b - a) / panels, s = 0.0;
  for (int p = 0; p < panels; ++p) {
    double m = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(m + 0.5 * h * rule.nodes[i]);
  }
  return 0.5 * h * s;
}

}  // namespace hadamard::testing
