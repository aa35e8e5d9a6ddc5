#pragma once

// Smooth functions built from one-dimensional factors.
//
// Every smooth function in the library is a finite sum of tensor products
// f(x) = c * prod_j f_j(x_j), so partial derivatives factor per axis and all
// integrals reduce to one-dimensional quadrature.

#include <memory>
#include <string>
#include <vector>

#include "hadamard/region.hpp"
#include "hadamard/types.hpp"

namespace hadamard {

inline constexpr int kMaxJetOrder = 40;

/// |f^(k)(x)| <= scale * |x|^power whenever |x| >= the queried radius.
struct Envelope {
  double scale = 0.0;
  double power = 0.0;
};

/// Smooth function of one variable with derivatives up to max_order().
class AxisFunction {
 public:
  virtual ~AxisFunction() = default;
  virtual double derivative(double x, int k) const = 0;
  double value(double x) const { return derivative(x, 0); }
  /// Closed hull of the support; lo() > hi() means identically zero.
  virtual double lo() const = 0;
  virtual double hi() const = 0;
  virtual int max_order() const = 0;
  /// Tail bound for |x| >= r >= 1. Only called when the support is unbounded.
  virtual Envelope envelope(double r, int k) const;
  bool vanishes() const { return lo() > hi(); }
  bool bounded() const;
};
using AxisFunctionPtr = std::shared_ptr<const AxisFunction>;

/// Factor that can produce Taylor coefficients f^(k)(x)/k!, k = 0..n.
class JetFactor : public AxisFunction {
 public:
  virtual void taylor(double x, int n, double* out) const = 0;
  double derivative(double x, int k) const override;
  int max_order() const override { return kMaxJetOrder; }
};
using JetFactorPtr = std::shared_ptr<const JetFactor>;

/// sum_i coeffs[i] x^i. Unbounded support.
class PolynomialFactor : public JetFactor {
 public:
  explicit PolynomialFactor(std::vector<double> coeffs);
  void taylor(double x, int n, double* out) const override;
  double lo() const override;
  double hi() const override;
  Envelope envelope(double r, int k) const override;
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// exp(-1/(1-u^2)) with u = (x-c)/r on |u| < 1, else 0.
class BumpFactor : public JetFactor {
 public:
  BumpFactor(double center, double radius);
  /// Taylor coefficients from the jet recurrence for exp(-1/q), q = 1-u^2.
  void taylor(double x, int n, double* out) const override;
  /// Closed form P_k(u) * bump / (1-u^2)^(2k) / r^k. Loses digits to
  /// cancellation in P_k for large k near the edge; kept as a cross-check.
  double derivative_closed_form(double x, int k) const;
  double lo() const override { return c_ - r_; }
  double hi() const override { return c_ + r_; }
  double center() const { return c_; }
  double radius() const { return r_; }

 private:
  double c_, r_;
};

/// 1 on |x-c| <= inner, 0 on |x-c| >= outer, smooth in between.
class PlateauFactor : public JetFactor {
 public:
  PlateauFactor(double center, double inner, double outer);
  void taylor(double x, int n, double* out) const override;
  double lo() const override { return c_ - outer_; }
  double hi() const override { return c_ + outer_; }
  double center() const { return c_; }
  double inner() const { return inner_; }
  double outer() const { return outer_; }

 private:
  double c_, inner_, outer_;
};

/// Product of jet factors on one axis, derivatives capped at max_order.
class ProductAxis : public AxisFunction {
 public:
  ProductAxis(std::vector<JetFactorPtr> factors, int max_order = kMaxJetOrder);
  double derivative(double x, int k) const override;
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  int max_order() const override { return max_order_; }
  Envelope envelope(double r, int k) const override;
  const std::vector<JetFactorPtr>& factors() const { return factors_; }

 private:
  std::vector<JetFactorPtr> factors_;
  int max_order_;
  double lo_, hi_;
};

/// x -> x^g f^(g)(x y): the axis factor of x^gamma (d^gamma phi)(x y).
class DilatedAxis : public AxisFunction {
 public:
  DilatedAxis(AxisFunctionPtr base, double y, int g);
  double derivative(double x, int k) const override;
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  int max_order() const override { return base_->max_order() - g_; }
  Envelope envelope(double r, int k) const override;

 private:
  AxisFunctionPtr base_;
  double y_;
  int g_;
  double lo_, hi_;
};

/// sign(x) x^(-p) for integer p >= 1, on the whole line minus the origin.
class InverseMonomialAxis : public AxisFunction {
 public:
  explicit InverseMonomialAxis(int p);
  double derivative(double x, int k) const override;
  double lo() const override;
  double hi() const override;
  int max_order() const override { return 64; }
  Envelope envelope(double r, int k) const override;

 private:
  int p_;
};

struct SmoothTerm {
  double coefficient = 1.0;
  std::vector<AxisFunctionPtr> axes;
};

class SmoothFunction {
 public:
  SmoothFunction() = default;
  SmoothFunction(int dim, std::vector<SmoothTerm> terms);

  int dim() const { return dim_; }
  const std::vector<SmoothTerm>& terms() const { return terms_; }
  /// Largest k such that every axis supplies k derivatives.
  int max_order() const;
  double value(const Point& x) const;
  /// Throws UnderivableOrder when some axis cannot supply beta_j derivatives.
  double derivative(const Point& x, const MultiIndex& beta) const;
  /// Union of the term support boxes (closed, converted exactly from double).
  Region support() const;
  bool compact() const;
  /// x -> f(eta x).
  SmoothFunction dilated(const Point& eta) const;

 protected:
  int dim_ = 0;
  std::vector<SmoothTerm> terms_;
};

/// One-dimensional factor description, kept for reporting.
struct FactorSpec {
  enum class Kind { Polynomial, Bump, Plateau } kind = Kind::Bump;
  std::vector<double> coeffs;  // polynomial
  double center = 0.0, radius = 1.0;  // bump; plateau outer radius
  double inner = 0.0;  // plateau
};

struct TestTermSpec {
  double coefficient = 1.0;
  std::vector<std::vector<FactorSpec>> factors;  // per coordinate
};

/// Compactly supported smooth function assembled from factor specs.
class TestFunction : public SmoothFunction {
 public:
  TestFunction() = default;
  TestFunction(int dim, std::vector<TestTermSpec> terms, int max_derivative_order = 24);
  /// prod_j bump(c_j, r_j).
  static TestFunction bump(const Point& center, const Point& radius, int max_order = 24);
  int max_derivative_order() const { return max_order_; }
  const std::vector<TestTermSpec>& specs() const { return specs_; }

 private:
  std::vector<TestTermSpec> specs_;
  int max_order_ = 24;
};

JetFactorPtr make_factor(const FactorSpec& spec);

// Taylor jet arithmetic on coefficient arrays of length n + 1.
void jet_mul(const double* a, const double* b, int n, double* out);
void jet_exp(const double* a, int n, double* out);
void jet_reciprocal(const double* a, int n, double* out);

double falling_factorial(double a, int k);
double binomial(int n, int k);
/// Stirling numbers of the second kind from S(n,k) = k S(n-1,k) + S(n-1,k-1).
/// Exact for n <= 20.
long long stirling2(int n, int k);

}  // namespace hadamard
