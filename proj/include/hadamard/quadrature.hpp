#pragma once

#include <functional>
#include <vector>

namespace hadamard {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  /// Relative to the integral of |f|; 0 disables.
  double rel_tol = 0.0;
  int max_depth = 30;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int n);

/// Globally adaptive panel Gauss-Legendre on a finite interval. A panel's
/// error is the gap between its 10-point estimate and the sum over its two
/// halves; the panel with the largest error is bisected until the total is
/// within max(abs_tol, rel_tol * integral of |f|). The subdivision depends on
/// integrand values only, so results are reproducible bit for bit.
/// Throws QuadratureNoConvergence when a panel would exceed max_depth.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts = {});

}  // namespace hadamard
