#pragma once

// Euler operators P(theta) with theta_j = x_j d/dx_j.

#include <map>
#include <string>

#include "hadamard/distribution.hpp"
#include "hadamard/functions.hpp"

namespace hadamard {

class EulerPolynomial {
 public:
  EulerPolynomial() = default;
  /// Zero coefficients are dropped; at least one must remain.
  EulerPolynomial(int dim, std::map<MultiIndex, double> coeffs);
  static EulerPolynomial constant(int dim, double c = 1.0);
  /// theta_j (0-based coordinate).
  static EulerPolynomial theta(int dim, int j = 0);

  int dim() const { return dim_; }
  const std::map<MultiIndex, double>& coeffs() const { return coeffs_; }
  /// Highest power of theta_j per coordinate.
  MultiIndex degree() const;
  double evaluate(const MultiIndex& alpha) const;
  std::string str() const;

 private:
  int dim_ = 0;
  std::map<MultiIndex, double> coeffs_;
};

/// theta^beta = sum_gamma coeff_gamma x^gamma d^gamma with Stirling numbers.
/// Throws OrderTooLarge when a component exceeds 12.
std::map<MultiIndex, long long> theta_expand(const MultiIndex& beta);

/// P(theta) as sum_gamma c_gamma x^gamma d^gamma.
std::map<MultiIndex, double> derivative_form(const EulerPolynomial& p);

/// (P(theta) phi)(x) through the expanded derivative form.
double apply_euler(const EulerPolynomial& p, const SmoothFunction& phi, const Point& x);

/// P(alpha).
double euler_eigenvalue(const EulerPolynomial& p, const MultiIndex& alpha);

/// P(-theta - 1): the transpose of P(theta) under the Lebesgue pairing.
EulerPolynomial transpose(const EulerPolynomial& p);

/// Point-mass combination T at the unit point whose operator S -> S * T acts
/// on distributions as P(theta). Its transpose action is
/// (M phi)(y) = T_x phi(x y) = P(-theta-1) phi (y), and the eigenvalue of T
/// on x^alpha is exactly P(alpha).
DistributionRep euler_to_hadamard(const EulerPolynomial& p);

}  // namespace hadamard
