#include "hadamard/distribution.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace hadamard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
}

// Decay classes ordered from strongest to weakest.
DecayClass weaker(const DecayClass& a, const DecayClass& b) {
  if (a.kind == DecayKind::Polynomial && b.kind == DecayKind::Polynomial)
    return DecayClass::polynomial(std::min(a.order, b.order));
  if (a.kind == DecayKind::Polynomial) return a;
  if (b.kind == DecayKind::Polynomial) return b;
  if (a.kind == DecayKind::Rapid || b.kind == DecayKind::Rapid) return DecayClass::rapid();
  return DecayClass::compact();
}

}  // namespace

DecayClass DecayClass::polynomial(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "polynomial decay order must be >= 0");
  return {DecayKind::Polynomial, p};
}

std::string DecayClass::str() const {
  switch (kind) {
    case DecayKind::Compact: return "compact";
    case DecayKind::Rapid: return "rapid";
    case DecayKind::Polynomial: return "polynomial(" + num(order) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Kernels

double ConstantKernel::tail_moment(double, double) const { return c_ == 0.0 ? 0.0 : kInf; }
std::string ConstantKernel::str() const { return c_ == 1.0 ? "one" : "const(" + num(c_) + ")"; }

ExpKernel::ExpKernel(double rate) : rate_(rate) { check_positive(rate, "exp rate"); }
double ExpKernel::value(double x) const { return std::exp(-rate_ * std::fabs(x)); }
double ExpKernel::tail_moment(double r, double q) const {
  // 2 * int_r^inf x^q e^(-a x) dx = 2 Gamma(q+1, a r) / a^(q+1)
  return 2.0 * boost::math::tgamma(q + 1.0, rate_ * r) / std::pow(rate_, q + 1.0);
}
double ExpKernel::decay_order() const { return kInf; }
std::string ExpKernel::str() const { return "exp(" + num(rate_) + ")"; }

GaussKernel::GaussKernel(double rate) : rate_(rate) { check_positive(rate, "gauss rate"); }
double GaussKernel::value(double x) const { return std::exp(-rate_ * x * x); }
double GaussKernel::tail_moment(double r, double q) const {
  return std::pow(rate_, -(q + 1.0) / 2.0) * boost::math::tgamma((q + 1.0) / 2.0, rate_ * r * r);
}
double GaussKernel::decay_order() const { return kInf; }
std::string GaussKernel::str() const { return "gauss(" + num(rate_) + ")"; }

PowerDecayKernel::PowerDecayKernel(double p) : p_(p) { check_positive(p, "power decay order"); }
double PowerDecayKernel::value(double x) const { return std::pow(1.0 + x * x, -p_ / 2.0); }
double PowerDecayKernel::tail_moment(double r, double q) const {
  // (1+x^2)^(-p/2) <= |x|^-p
  if (!(p_ > q + 1.0)) return kInf;
  return 2.0 * std::pow(r, q - p_ + 1.0) / (p_ - q - 1.0);
}
std::string PowerDecayKernel::str() const { return "power_decay(" + num(p_) + ")"; }

double BumpKernel::tail_moment(double r, double) const {
  return r >= std::max(std::fabs(bump_.lo()), std::fabs(bump_.hi())) ? 0.0 : kInf;
}
double BumpKernel::decay_order() const { return kInf; }
std::string BumpKernel::str() const { return "bump(" + num(bump_.center()) + "," + num(bump_.radius()) + ")"; }

double PolynomialKernel::tail_moment(double, double) const { return poly_.coeffs().empty() ? 0.0 : kInf; }
double PolynomialKernel::decay_order() const {
  return poly_.coeffs().empty() ? kInf : -static_cast<double>(poly_.coeffs().size() - 1);
}
std::string PolynomialKernel::str() const {
  std::string s = "poly[";
  for (std::size_t i = 0; i < poly_.coeffs().size(); ++i) s += (i ? "," : "") + num(poly_.coeffs()[i]);
  return s + "]";
}

TabulatedKernel::TabulatedKernel(int sign, double u0, double h, std::vector<double> values)
    : sign_(sign), u0_(u0), h_(h), values_(std::move(values)) {
  if (sign != 1 && sign != -1) fail(ErrorCode::InvalidArgument, "tabulated kernel sign must be +-1");
  check_positive(h, "grid step");
  if (values_.size() < 2) fail(ErrorCode::InvalidArgument, "tabulated kernel needs at least two samples");
}

double TabulatedKernel::value(double x) const {
  if (x == 0.0 || (x > 0.0) != (sign_ > 0)) return 0.0;
  double t = (std::log(std::fabs(x)) - u0_) / h_;
  double last = static_cast<double>(values_.size() - 1);
  if (t < 0.0 || t > last) return 0.0;
  auto i = static_cast<std::size_t>(std::floor(t));
  if (i >= values_.size() - 1) return values_.back();
  double w = t - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double TabulatedKernel::lo() const {
  double a = std::exp(u0_), b = std::exp(u0_ + h_ * static_cast<double>(values_.size() - 1));
  return sign_ > 0 ? a : -b;
}

double TabulatedKernel::hi() const {
  double a = std::exp(u0_), b = std::exp(u0_ + h_ * static_cast<double>(values_.size() - 1));
  return sign_ > 0 ? b : -a;
}

double TabulatedKernel::tail_moment(double r, double) const {
  return r > std::max(std::fabs(lo()), std::fabs(hi())) ? 0.0 : kInf;
}
double TabulatedKernel::decay_order() const { return kInf; }
std::string TabulatedKernel::str() const { return "tabulated(" + std::to_string(values_.size()) + ")"; }

// ---------------------------------------------------------------------------
// Density

void interval_bounds(const Interval& iv, double& lo, double& hi) {
  lo = iv.lo.finite() ? to_double(iv.lo.value()) : -kInf;
  hi = iv.hi.finite() ? to_double(iv.hi.value()) : kInf;
}

Density::Density(int dim, std::vector<DensityTerm> terms, DecayClass decay)
    : dim_(dim), terms_(std::move(terms)), decay_(decay) {
  check_dimension(dim);
  if (terms_.empty()) fail(ErrorCode::InvalidArgument, "density needs at least one term");
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    std::string where = "density term " + std::to_string(i);
    if (t.box.dim() != dim || static_cast<int>(t.factors.size()) != dim)
      fail(ErrorCode::InvalidArgument, where + ": needs one interval and one factor per coordinate");
    if (t.box.empty()) fail(ErrorCode::InvalidArgument, where + ": empty box");
    if (!std::isfinite(t.coefficient)) fail(ErrorCode::InvalidArgument, where + ": coefficient not finite");
    for (int j = 0; j < dim; ++j) {
      const auto& k = t.factors[static_cast<std::size_t>(j)];
      if (!k) fail(ErrorCode::InvalidArgument, where + ": missing factor");
      const auto& side = t.box.sides[static_cast<std::size_t>(j)];
      if (side.bounded()) continue;
      double need = decay_.kind == DecayKind::Rapid ? kInf : decay_.order;
      if (decay_.kind == DecayKind::Compact)
        fail(ErrorCode::InvalidArgument, where + ": decay tag compact but support " + side.str() + " is unbounded");
      if (k->decay_order() < need)
        fail(ErrorCode::InvalidArgument, where + ": factor " + k->str() + " on unbounded side " + side.str() +
                                             " does not decay as declared by tag " + decay_.str());
    }
    boxes.push_back(t.box);
  }
  support_ = simplify(Region(dim, std::move(boxes)));
}

Density Density::on_region(double coefficient, std::vector<KernelPtr> factors, const Region& support,
                           DecayClass decay) {
  if (support.empty()) fail(ErrorCode::EmptyRegion, "density support is empty");
  std::vector<DensityTerm> terms;
  Region pieces = disjoint_boxes(support);
  for (const auto& b : pieces.boxes()) {
    bool degenerate = false;
    for (const auto& s : b.sides)
      if (s.lo == s.hi) degenerate = true;
    if (!degenerate) terms.push_back({coefficient, b, factors});
  }
  if (terms.empty()) fail(ErrorCode::EmptyRegion, "density support has measure zero");
  return Density(support.dim(), std::move(terms), decay);
}

Density Density::indicator(const Region& support) {
  std::vector<KernelPtr> one(static_cast<std::size_t>(support.dim()), std::make_shared<ConstantKernel>(1.0));
  return on_region(1.0, one, support, support.is_bounded() ? DecayClass::compact() : DecayClass::polynomial(0));
}

double Density::value(const Point& x) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    double p = t.coefficient;
    for (int j = 0; j < dim_ && p != 0.0; ++j) {
      double lo, hi;
      interval_bounds(t.box.sides[static_cast<std::size_t>(j)], lo, hi);
      if (x[j] < lo || x[j] > hi) p = 0.0;
      else p *= t.factors[static_cast<std::size_t>(j)]->value(x[j]);
    }
    s += p;
  }
  return s;
}

// ---------------------------------------------------------------------------
// DistributionRep

DistributionRep DistributionRep::point_masses(int dim, std::vector<PointMass> terms) {
  check_dimension(dim);
  if (terms.empty()) fail(ErrorCode::InvalidArgument, "point-mass combination needs at least one term");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    std::string where = "point mass " + std::to_string(i);
    if (static_cast<int>(t.anchor.size()) != dim || t.order.dim != dim)
      fail(ErrorCode::InvalidArgument, where + ": anchor/order dimension mismatch");
    if (t.weight == 0.0 || !std::isfinite(t.weight))
      fail(ErrorCode::InvalidArgument, where + ": weight must be nonzero and finite");
    for (int j = 0; j < dim; ++j)
      if (t.order[j] < 0) fail(ErrorCode::InvalidArgument, where + ": negative derivative order");
  }
  DistributionRep r;
  r.dim_ = dim;
  r.rep_ = PointMassCombo{dim, std::move(terms)};
  return r;
}

DistributionRep DistributionRep::delta(const Point& a, double weight) { return delta(a, MultiIndex(a.dim), weight); }

DistributionRep DistributionRep::delta(const Point& a, const MultiIndex& order, double weight) {
  for (int j = 0; j < a.dim; ++j)
    if (!std::isfinite(a[j])) fail(ErrorCode::InvalidArgument, "anchor not finite");
  return point_masses(a.dim, {PointMass{to_rpoint(a), order, weight}});
}

DistributionRep DistributionRep::density(Density d) {
  if (d.dim() == 0) fail(ErrorCode::InvalidArgument, "empty density");
  DistributionRep r;
  r.dim_ = d.dim();
  r.rep_ = std::move(d);
  return r;
}

DistributionRep DistributionRep::euler(int dim, std::vector<EulerTerm> terms) {
  check_dimension(dim);
  if (terms.empty()) fail(ErrorCode::InvalidArgument, "Euler form needs at least one term");
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].beta.dim != dim || terms[i].density.dim() != dim)
      fail(ErrorCode::InvalidArgument, "Euler term " + std::to_string(i) + ": dimension mismatch");
  DistributionRep r;
  r.dim_ = dim;
  r.rep_ = EulerForm{dim, std::move(terms)};
  return r;
}

MultiIndex DistributionRep::max_order() const {
  MultiIndex m(dim_);
  if (auto* pm = std::get_if<PointMassCombo>(&rep_)) {
    for (const auto& t : pm->terms)
      for (int j = 0; j < dim_; ++j) m[j] = std::max(m[j], t.order[j]);
  } else if (auto* ef = std::get_if<EulerForm>(&rep_)) {
    for (const auto& t : ef->terms)
      for (int j = 0; j < dim_; ++j) m[j] = std::max(m[j], t.beta[j]);
  }
  return m;
}

namespace {
std::string rpoint_str(const RPoint& p) {
  std::string s = "(";
  for (std::size_t j = 0; j < p.size(); ++j) s += (j ? "," : "") + format_rational(p[j]);
  return s + ")";
}

std::string density_str(const Density& d) {
  std::string s;
  for (std::size_t i = 0; i < d.terms().size(); ++i) {
    const auto& t = d.terms()[i];
    if (i) s += " + ";
    s += num(t.coefficient) + "*";
    for (std::size_t j = 0; j < t.factors.size(); ++j) s += (j ? "x" : "") + t.factors[j]->str();
    s += " on " + t.box.str();
  }
  return s + " [" + d.decay().str() + "]";
}
}  // namespace

std::string DistributionRep::describe() const {
  std::string s;
  switch (kind()) {
    case DistributionKind::PointMassCombo: {
      const auto& pm = point_mass_combo();
      for (std::size_t i = 0; i < pm.terms.size(); ++i) {
        const auto& t = pm.terms[i];
        if (i) s += " + ";
        s += num(t.weight) + "*delta_" + rpoint_str(t.anchor);
        if (t.order.total() > 0) s += "^" + t.order.str();
      }
      return s;
    }
    case DistributionKind::Density: return "density " + density_str(as_density());
    case DistributionKind::EulerForm: {
      const auto& ef = euler_form();
      for (std::size_t i = 0; i < ef.terms.size(); ++i) {
        if (i) s += " + ";
        s += "theta^" + ef.terms[i].beta.str() + "[" + density_str(ef.terms[i].density) + "]";
      }
      return s;
    }
  }
  return s;
}

DistributionRep linear_combination(double a, const DistributionRep& t1, double b, const DistributionRep& t2) {
  if (t1.dim() != t2.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  if (t1.kind() != t2.kind()) fail(ErrorCode::InvalidArgument, "linear combination needs distributions of one kind");
  switch (t1.kind()) {
    case DistributionKind::PointMassCombo: {
      std::vector<PointMass> terms;
      for (auto t : t1.point_mass_combo().terms) {
        t.weight *= a;
        if (t.weight != 0.0) terms.push_back(t);
      }
      for (auto t : t2.point_mass_combo().terms) {
        t.weight *= b;
        if (t.weight != 0.0) terms.push_back(t);
      }
      return DistributionRep::point_masses(t1.dim(), std::move(terms));
    }
    case DistributionKind::Density: {
      std::vector<DensityTerm> terms;
      for (auto t : t1.as_density().terms()) {
        t.coefficient *= a;
        terms.push_back(t);
      }
      for (auto t : t2.as_density().terms()) {
        t.coefficient *= b;
        terms.push_back(t);
      }
      return DistributionRep::density(
          Density(t1.dim(), std::move(terms), weaker(t1.as_density().decay(), t2.as_density().decay())));
    }
    case DistributionKind::EulerForm: {
      std::vector<EulerTerm> terms;
      auto scaled = [](const EulerTerm& e, double c) {
        std::vector<DensityTerm> dt = e.density.terms();
        for (auto& t : dt) t.coefficient *= c;
        return EulerTerm{e.beta, Density(e.density.dim(), std::move(dt), e.density.decay())};
      };
      for (const auto& t : t1.euler_form().terms) terms.push_back(scaled(t, a));
      for (const auto& t : t2.euler_form().terms) terms.push_back(scaled(t, b));
      return DistributionRep::euler(t1.dim(), std::move(terms));
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown distribution kind");
}

std::vector<SeparableTerm> separable_terms(const DistributionRep& t) {
  std::vector<SeparableTerm> out;
  auto density_axes = [&](const Density& d, const MultiIndex* beta) {
    for (const auto& term : d.terms()) {
      SeparableTerm s{term.coefficient, {}};
      for (int j = 0; j < d.dim(); ++j) {
        AxisDistribution a;
        a.point = false;
        a.order = beta ? (*beta)[j] : 0;
        a.kernel = term.factors[static_cast<std::size_t>(j)];
        a.interval = term.box.sides[static_cast<std::size_t>(j)];
        interval_bounds(a.interval, a.lo, a.hi);
        s.axes.push_back(std::move(a));
      }
      out.push_back(std::move(s));
    }
  };
  switch (t.kind()) {
    case DistributionKind::PointMassCombo:
      for (const auto& pm : t.point_mass_combo().terms) {
        SeparableTerm s{pm.weight, {}};
        for (int j = 0; j < t.dim(); ++j) {
          AxisDistribution a;
          a.point = true;
          a.anchor = to_double(pm.anchor[static_cast<std::size_t>(j)]);
          a.order = pm.order[j];
          a.interval = Interval::point(pm.anchor[static_cast<std::size_t>(j)]);
          a.lo = a.hi = a.anchor;
          s.axes.push_back(std::move(a));
        }
        out.push_back(std::move(s));
      }
      break;
    case DistributionKind::Density: density_axes(t.as_density(), nullptr); break;
    case DistributionKind::EulerForm:
      for (const auto& e : t.euler_form().terms) density_axes(e.density, &e.beta);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairing

void PairStats::merge(const PairStats& o) {
  truncation_radius = std::max(truncation_radius, o.truncation_radius);
  tail_bound += o.tail_bound;
  evaluations += o.evaluations;
}

std::vector<double> euler_transpose_coefficients(int e) {
  if (e < 0 || e > 20) fail(ErrorCode::OrderTooLarge, "Euler power must be in 0..20");
  // (-(theta+1))^e = (-1)^e sum_i C(e,i) theta^i,  theta^i = sum_g S(i,g) x^g d^g
  std::vector<double> c(static_cast<std::size_t>(e + 1), 0.0);
  double sign = e % 2 ? -1.0 : 1.0;
  for (int i = 0; i <= e; ++i)
    for (int g = 0; g <= i; ++g)
      c[static_cast<std::size_t>(g)] += sign * binomial(e, i) * static_cast<double>(stirling2(i, g));
  return c;
}

namespace {

const std::vector<double>& transpose_coefficients_cached(int e) {
  static const auto table = [] {
    std::array<std::vector<double>, 21> t;
    for (int i = 0; i <= 20; ++i) t[static_cast<std::size_t>(i)] = euler_transpose_coefficients(i);
    return t;
  }();
  if (e < 0 || e > 20) fail(ErrorCode::OrderTooLarge, "Euler power must be in 0..20");
  return table[static_cast<std::size_t>(e)];
}

void require_order(int need, const AxisFunction& f) {
  if (need > f.max_order()) {
    std::ostringstream os;
    os << "distribution needs derivative order " << need << " but the function supplies only " << f.max_order();
    fail(ErrorCode::UnderivableOrder, os.str());
  }
}

}  // namespace

double pair_axis(const AxisDistribution& tau, const AxisFunction& f, const PairOptions& opts, PairStats* stats) {
  require_order(tau.order, f);
  if (f.vanishes()) return 0.0;
  if (tau.point) {
    if (tau.anchor < f.lo() || tau.anchor > f.hi()) return 0.0;
    double v = f.derivative(tau.anchor, tau.order);
    return tau.order % 2 ? -v : v;
  }
  double lo = std::max(tau.lo, f.lo()), hi = std::min(tau.hi, f.hi());
  if (!(lo < hi)) return 0.0;
  const auto& c = transpose_coefficients_cached(tau.order);
  const Kernel& k = *tau.kernel;
  auto integrand = [&](double x) {
    double s = 0.0, xg = 1.0;
    for (std::size_t g = 0; g < c.size(); ++g) {
      if (c[g] != 0.0) s += c[g] * xg * f.derivative(x, static_cast<int>(g));
      xg *= x;
    }
    double kv = k.value(x);
    return kv == 0.0 ? 0.0 : kv * s;
  };
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    double budget = opts.quad.abs_tol * 1e-2;
    double r = 1.0;
    if (std::isfinite(lo)) r = std::max(r, std::fabs(lo));
    if (std::isfinite(hi)) r = std::max(r, std::fabs(hi));
    r *= 2.0;
    double bound = kInf;
    for (int it = 0; it < 200; ++it) {
      double scale = 0.0, power = 0.0;
      bool first = true;
      for (std::size_t g = 0; g < c.size(); ++g) {
        if (c[g] == 0.0) continue;
        Envelope e = f.envelope(r, static_cast<int>(g));
        if (e.scale == 0.0) continue;
        scale += std::fabs(c[g]) * e.scale;
        double p = static_cast<double>(g) + e.power;
        power = first ? p : std::max(power, p);
        first = false;
      }
      bound = scale == 0.0 ? 0.0 : scale * k.tail_moment(r, std::max(power, 0.0));
      if (bound <= budget) break;
      r *= 2.0;
    }
    if (!(bound <= budget)) {
      std::ostringstream os;
      os << "tail of " << k.str() << " on " << tau.interval.str() << " cannot be bounded below " << budget
         << " (decay too slow for the integrand)";
      fail(ErrorCode::QuadratureNoConvergence, os.str());
    }
    lo = std::max(lo, -r);
    hi = std::min(hi, r);
    if (stats) {
      stats->truncation_radius = std::max(stats->truncation_radius, r);
      stats->tail_bound += bound;
    }
  }
  auto res = integrate_adaptive(integrand, lo, hi, opts.quad);
  if (stats) stats->evaluations += res.evaluations;
  return res.value;
}

double pair(const DistributionRep& t, const SmoothFunction& f, const PairOptions& opts, PairStats* stats) {
  if (t.dim() != f.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch between distribution and function");
  // order precondition, checked up front so it does not depend on locality
  MultiIndex need = t.max_order();
  for (const auto& ft : f.terms())
    for (int j = 0; j < t.dim(); ++j) require_order(need[j], *ft.axes[static_cast<std::size_t>(j)]);
  double total = 0.0;
  for (const auto& st : separable_terms(t)) {
    for (const auto& ft : f.terms()) {
      double p = st.weight * ft.coefficient;
      for (int j = 0; j < t.dim() && p != 0.0; ++j)
        p *= pair_axis(st.axes[static_cast<std::size_t>(j)], *ft.axes[static_cast<std::size_t>(j)], opts, stats);
      total += p;
    }
  }
  return total;
}

Region support_of(const DistributionRep& t) {
  switch (t.kind()) {
    case DistributionKind::PointMassCombo: {
      std::vector<Box> boxes;
      for (const auto& pm : t.point_mass_combo().terms) boxes.push_back(Box::point(pm.anchor));
      return simplify(Region(t.dim(), std::move(boxes)));
    }
    case DistributionKind::Density: return t.as_density().support();
    case DistributionKind::EulerForm: {
      Region r(t.dim());
      for (const auto& e : t.euler_form().terms) r = unite(r, e.density.support());
      return r;
    }
  }
  return Region(t.dim());
}

double hyperplane_clearance(const DistributionRep& t) { return hyperplane_distance(support_of(t)).to_double(); }

const char* to_string(Membership m) {
  switch (m) {
    case Membership::Certified: return "Certified";
    case Membership::Refuted: return "Refuted";
    case Membership::Unknown: return "Unknown";
  }
  return "?";
}

Membership is_OH(const DistributionRep& t) {
  auto density_status = [](const Density& d) {
    if (d.support().is_bounded() || d.decay().kind != DecayKind::Polynomial) return Membership::Certified;
    return Membership::Unknown;
  };
  switch (t.kind()) {
    case DistributionKind::PointMassCombo: return Membership::Certified;
    case DistributionKind::Density: return density_status(t.as_density());
    case DistributionKind::EulerForm:
      for (const auto& e : t.euler_form().terms)
        if (density_status(e.density) != Membership::Certified) return Membership::Unknown;
      return Membership::Certified;
  }
  return Membership::Unknown;
}

}  // namespace hadamard
