#pragma once

// Transpose action (M phi)(y) = T_x phi(x y), operator application
// L(S) phi = S(M phi), eigenvalues on monomials and their verification
// through int xi^alpha (m_alpha phi(xi) - (M phi)(xi)) dxi = 0.

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hadamard/distribution.hpp"
#include "hadamard/functions.hpp"

namespace hadamard {

/// y -> tau_x f(x y) in one variable, with exact chain-rule derivatives
/// d^k/dy^k = tau_x(x^k f^(k)(x y)) and a value cache.
class TransposedAxis : public AxisFunction {
 public:
  TransposedAxis(AxisDistribution tau, AxisFunctionPtr f, PairOptions opts);
  double derivative(double y, int k) const override;
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  int max_order() const override { return f_->max_order() - tau_.order; }

 private:
  AxisDistribution tau_;
  AxisFunctionPtr f_;
  PairOptions opts_;
  double lo_, hi_;
  mutable std::mutex mu_;
  mutable std::vector<std::unordered_map<unsigned long long, double>> cache_;  // by order
};

/// psi = M phi. Values outside the certified support are exactly zero.
class SampledFunction {
 public:
  SampledFunction(const DistributionRep& t, const SmoothFunction& phi, const PairOptions& opts);

  int dim() const { return smooth_.dim(); }
  const Region& certified_support() const { return support_; }
  double value(const Point& y) const;
  double derivative(const Point& y, const MultiIndex& gamma) const;
  /// The separable representation, for pairing and integration.
  const SmoothFunction& smooth() const { return smooth_; }

 private:
  SmoothFunction smooth_;
  Region support_;
};

SampledFunction transpose_apply(const DistributionRep& t, const SmoothFunction& phi, const PairOptions& opts = {});

struct EigenvalueResult {
  double value = 0.0;
  PairStats stats;
};

/// m_alpha = T(sigma(x) x^(-alpha-1)). Throws SupportTouchesHyperplane when
/// the support of T meets a coordinate hyperplane.
EigenvalueResult eigenvalue_detail(const DistributionRep& t, const MultiIndex& alpha, const PairOptions& opts = {});
double eigenvalue(const DistributionRep& t, const MultiIndex& alpha, const PairOptions& opts = {});

struct EigenReport {
  MultiIndex alpha;
  double eigenvalue = 0.0;
  double residual = 0.0;
  double scale = 0.0;  // int |xi^alpha phi(xi)| dxi
  double tolerance = 0.0;
  bool pass = false;
  double truncation_radius = 0.0;
};

/// Shared state for many eigen-equation checks with one (T, phi): psi and the
/// per-axis moments are computed once.
class EigenContext {
 public:
  EigenContext(const DistributionRep& t, const SmoothFunction& phi, const PairOptions& opts = {});
  EigenReport report(const MultiIndex& alpha, double tolerance) const;
  const SampledFunction& psi() const { return psi_; }

 private:
  double moment(const SmoothFunction& f, std::size_t term, int axis, int k, bool absolute) const;
  double scale(const MultiIndex& alpha) const;

  DistributionRep t_;
  SmoothFunction phi_;
  PairOptions opts_;
  SampledFunction psi_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, std::size_t, int, int, bool>, double> moments_;
};

EigenReport verify_monomial_eq(const DistributionRep& t, const MultiIndex& alpha, const SmoothFunction& phi,
                               double tolerance = 1e-7, const PairOptions& opts = {});

/// (S * T) phi = S(M phi).
double operator_apply(const DistributionRep& t, const DistributionRep& s, const SmoothFunction& phi,
                      const PairOptions& opts = {});

/// |M(phi(eta .))(y) - (M phi)(eta y)|.
double dilation_commutes(const DistributionRep& t, const SmoothFunction& phi, const Point& eta, const Point& y,
                         const PairOptions& opts = {});

}  // namespace hadamard
