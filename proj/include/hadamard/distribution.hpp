#pragma once

// The three distribution classes: point-mass combinations, densities and
// Euler forms sum_beta theta^beta t_beta. All of them expand into sums of
// tensor products of one-dimensional pieces, which is what pairing uses.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hadamard/functions.hpp"
#include "hadamard/quadrature.hpp"
#include "hadamard/region.hpp"

namespace hadamard {

enum class DecayKind { Compact, Rapid, Polynomial };

struct DecayClass {
  DecayKind kind = DecayKind::Compact;
  double order = 0.0;  // polynomial only

  static DecayClass compact() { return {}; }
  static DecayClass rapid() { return {DecayKind::Rapid, 0.0}; }
  static DecayClass polynomial(double p);
  std::string str() const;
  bool operator==(const DecayClass& o) const { return kind == o.kind && order == o.order; }
};

/// One-dimensional density factor.
class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual double value(double x) const = 0;
  /// Upper bound for the integral of |k(x)| |x|^q over |x| >= r (r >= 1, q >= 0);
  /// +inf when no bound is available.
  virtual double tail_moment(double r, double q) const = 0;
  /// Rate of decay at infinity: +inf for rapid, p for |k| <= C|x|^-p.
  virtual double decay_order() const = 0;
  virtual std::string str() const = 0;
};
using KernelPtr = std::shared_ptr<const Kernel>;

/// c (use with a bounded box, or as the "1" of an indicator).
class ConstantKernel : public Kernel {
 public:
  explicit ConstantKernel(double c = 1.0) : c_(c) {}
  double value(double) const override { return c_; }
  double tail_moment(double, double) const override;
  double decay_order() const override { return 0.0; }
  std::string str() const override;

 private:
  double c_;
};

/// exp(-rate |x|).
class ExpKernel : public Kernel {
 public:
  explicit ExpKernel(double rate);
  double value(double x) const override;
  double tail_moment(double r, double q) const override;
  double decay_order() const override;
  std::string str() const override;

 private:
  double rate_;
};

/// exp(-rate x^2).
class GaussKernel : public Kernel {
 public:
  explicit GaussKernel(double rate);
  double value(double x) const override;
  double tail_moment(double r, double q) const override;
  double decay_order() const override;
  std::string str() const override;

 private:
  double rate_;
};

/// (1 + x^2)^(-p/2).
class PowerDecayKernel : public Kernel {
 public:
  explicit PowerDecayKernel(double p);
  double value(double x) const override;
  double tail_moment(double r, double q) const override;
  double decay_order() const override { return p_; }
  std::string str() const override;

 private:
  double p_;
};

/// The bump primitive as a density factor.
class BumpKernel : public Kernel {
 public:
  BumpKernel(double center, double radius) : bump_(center, radius) {}
  double value(double x) const override { return bump_.value(x); }
  double tail_moment(double r, double q) const override;
  double decay_order() const override;
  std::string str() const override;

 private:
  BumpFactor bump_;
};

/// sum_i c_i x^i.
class PolynomialKernel : public Kernel {
 public:
  explicit PolynomialKernel(std::vector<double> coeffs) : poly_(std::move(coeffs)) {}
  double value(double x) const override { return poly_.value(x); }
  double tail_moment(double, double) const override;
  double decay_order() const override;
  std::string str() const override;

 private:
  PolynomialFactor poly_;
};

/// Piecewise-linear samples on a uniform grid in log|x| within one sign.
class TabulatedKernel : public Kernel {
 public:
  TabulatedKernel(int sign, double u0, double h, std::vector<double> values);
  double value(double x) const override;
  double tail_moment(double r, double q) const override;
  double decay_order() const override;
  std::string str() const override;
  int sign() const { return sign_; }
  double u0() const { return u0_; }
  double step() const { return h_; }
  const std::vector<double>& values() const { return values_; }
  double lo() const;
  double hi() const;

 private:
  int sign_;
  double u0_, h_;
  std::vector<double> values_;
};

struct DensityTerm {
  double coefficient = 1.0;
  Box box;
  std::vector<KernelPtr> factors;  // one per coordinate
};

/// sum_i coefficient_i * 1_{box_i}(x) * prod_j factor_ij(x_j).
class Density {
 public:
  Density() = default;
  Density(int dim, std::vector<DensityTerm> terms, DecayClass decay);
  /// The same kernel on every box of a disjoint decomposition of the region.
  static Density on_region(double coefficient, std::vector<KernelPtr> factors, const Region& support,
                           DecayClass decay);
  /// 1 on a region.
  static Density indicator(const Region& support);

  int dim() const { return dim_; }
  const std::vector<DensityTerm>& terms() const { return terms_; }
  const DecayClass& decay() const { return decay_; }
  const Region& support() const { return support_; }
  double value(const Point& x) const;

 private:
  int dim_ = 0;
  std::vector<DensityTerm> terms_;
  DecayClass decay_;
  Region support_;
};

/// weight * delta_anchor^(order).
struct PointMass {
  RPoint anchor;
  MultiIndex order;
  double weight = 1.0;
};

struct PointMassCombo {
  int dim = 0;
  std::vector<PointMass> terms;
};

struct EulerTerm {
  MultiIndex beta;
  Density density;
};

struct EulerForm {
  int dim = 0;
  std::vector<EulerTerm> terms;
};

enum class DistributionKind { PointMassCombo, Density, EulerForm };

class DistributionRep {
 public:
  DistributionRep() = default;
  static DistributionRep point_masses(int dim, std::vector<PointMass> terms);
  static DistributionRep delta(const Point& a, double weight = 1.0);
  static DistributionRep delta(const Point& a, const MultiIndex& order, double weight = 1.0);
  static DistributionRep density(Density d);
  static DistributionRep euler(int dim, std::vector<EulerTerm> terms);

  int dim() const { return dim_; }
  DistributionKind kind() const { return static_cast<DistributionKind>(rep_.index()); }
  const PointMassCombo& point_mass_combo() const { return std::get<PointMassCombo>(rep_); }
  const Density& as_density() const { return std::get<Density>(rep_); }
  const EulerForm& euler_form() const { return std::get<EulerForm>(rep_); }
  /// Highest derivative order needed per coordinate.
  MultiIndex max_order() const;
  std::string describe() const;

 private:
  int dim_ = 0;
  std::variant<PointMassCombo, Density, EulerForm> rep_;
};

/// a*T1 + b*T2 for distributions of the same kind.
DistributionRep linear_combination(double a, const DistributionRep& t1, double b, const DistributionRep& t2);

/// One-dimensional factor of a separable term.
struct AxisDistribution {
  bool point = true;
  double anchor = 0.0;
  int order = 0;  // derivative order of delta, or Euler power on the density
  KernelPtr kernel;
  double lo = 0.0, hi = 0.0;  // density interval hull in double
  Interval interval;          // exact
};

struct SeparableTerm {
  double weight = 1.0;
  std::vector<AxisDistribution> axes;
};

std::vector<SeparableTerm> separable_terms(const DistributionRep& t);

struct PairOptions {
  QuadratureOptions quad{1e-10, 1e-12, 30};
};

struct PairStats {
  /// Largest truncation radius used for an unbounded density side, 0 if none.
  double truncation_radius = 0.0;
  /// Sum of certified tail bounds that were dropped.
  double tail_bound = 0.0;
  long evaluations = 0;
  void merge(const PairStats& o);
};

/// Coefficients c_g of (-(theta+1))^e = sum_g c_g x^g d^g.
std::vector<double> euler_transpose_coefficients(int e);

/// <tau, f> in one variable.
double pair_axis(const AxisDistribution& tau, const AxisFunction& f, const PairOptions& opts = {},
                 PairStats* stats = nullptr);

/// <T, f> for T in any class and f a sum of separable smooth terms.
double pair(const DistributionRep& t, const SmoothFunction& f, const PairOptions& opts = {},
            PairStats* stats = nullptr);

Region support_of(const DistributionRep& t);
/// inf over supp T of min_j |x_j|.
double hyperplane_clearance(const DistributionRep& t);

enum class Membership { Certified, Refuted, Unknown };
const char* to_string(Membership m);
Membership is_OH(const DistributionRep& t);

/// Interval hull of a closed interval in double, +-inf for unbounded ends.
void interval_bounds(const Interval& iv, double& lo, double& hi);

}  // namespace hadamard
