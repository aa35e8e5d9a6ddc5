#include "hadamard/hadamard_action.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace hadamard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval closed_hull(double lo, double hi) {
  XReal a = std::isfinite(lo) ? XReal(to_rational(lo)) : XReal::neg_inf();
  XReal b = std::isfinite(hi) ? XReal(to_rational(hi)) : XReal::pos_inf();
  return Interval::make(a, true, b, true);
}

Interval closure_of(const Interval& iv) {
  return Interval::make(iv.lo, iv.lo.finite(), iv.hi, iv.hi.finite());
}

// Nearest double on the outer side of an exact endpoint.
double outward(const XReal& v, double dir) {
  if (!v.finite()) return dir < 0 ? -kInf : kInf;
  double d = to_double(v.value());
  if (to_rational(d) == v.value()) return d;
  return std::nextafter(d, dir < 0 ? -kInf : kInf);
}

void require_clearance(const DistributionRep& t) {
  double c = hyperplane_clearance(t);
  if (!(c > 0.0)) {
    std::ostringstream os;
    os << "support " << support_of(t).str() << " meets a coordinate hyperplane (clearance 0)";
    fail(ErrorCode::SupportTouchesHyperplane, os.str());
  }
}

}  // namespace

TransposedAxis::TransposedAxis(AxisDistribution tau, AxisFunctionPtr f, PairOptions opts)
    : tau_(std::move(tau)), f_(std::move(f)), opts_(opts) {
  if (f_->vanishes()) {
    lo_ = kInf;
    hi_ = -kInf;
  } else {
    // y contributes only if x y lies in supp f for some x in supp tau
    Region r = reciprocal(Region::from_interval(closure_of(tau_.interval)));
    Region k = Region::from_interval(closed_hull(f_->lo(), f_->hi()));
    auto h = product_set(r, k).hull();
    if (!h) {
      lo_ = kInf;
      hi_ = -kInf;
    } else {
      const auto& side = h->sides[0];
      lo_ = outward(side.lo, -1);
      hi_ = outward(side.hi, 1);
    }
  }
  cache_.resize(static_cast<std::size_t>(std::max(0, max_order()) + 1));
}

double TransposedAxis::derivative(double y, int k) const {
  if (k < 0 || k > max_order()) {
    std::ostringstream os;
    os << "transpose action supplies derivatives up to order " << max_order() << ", order " << k << " requested";
    fail(ErrorCode::UnderivableOrder, os.str());
  }
  if (y < lo_ || y > hi_) return 0.0;
  unsigned long long key;
  std::memcpy(&key, &y, sizeof key);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto& c = cache_[static_cast<std::size_t>(k)];
    auto it = c.find(key);
    if (it != c.end()) return it->second;
  }
  // d^k/dy^k tau_x f(x y) = tau_x (x^k f^(k)(x y))
  DilatedAxis g(f_, y, k);
  double v = pair_axis(tau_, g, opts_);
  std::lock_guard<std::mutex> lock(mu_);
  cache_[static_cast<std::size_t>(k)].emplace(key, v);
  return v;
}

SampledFunction::SampledFunction(const DistributionRep& t, const SmoothFunction& phi, const PairOptions& opts) {
  if (t.dim() != phi.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch between distribution and function");
  require_clearance(t);
  if (!phi.compact()) fail(ErrorCode::InvalidArgument, "transpose action needs a compactly supported function");
  std::vector<SmoothTerm> terms;
  for (const auto& st : separable_terms(t)) {
    for (const auto& ft : phi.terms()) {
      SmoothTerm term{st.weight * ft.coefficient, {}};
      for (int j = 0; j < t.dim(); ++j)
        term.axes.push_back(std::make_shared<TransposedAxis>(st.axes[static_cast<std::size_t>(j)],
                                                             ft.axes[static_cast<std::size_t>(j)], opts));
      terms.push_back(std::move(term));
    }
  }
  smooth_ = SmoothFunction(t.dim(), std::move(terms));
  support_ = product_set(reciprocal(support_of(t)), phi.support());
}

double SampledFunction::value(const Point& y) const { return derivative(y, MultiIndex(y.dim)); }

double SampledFunction::derivative(const Point& y, const MultiIndex& gamma) const {
  if (y.dim != dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  for (int j = 0; j < y.dim; ++j)
    if (!std::isfinite(y[j])) fail(ErrorCode::InvalidArgument, "evaluation point not finite");
  if (!support_.contains(y)) return 0.0;
  return smooth_.derivative(y, gamma);
}

SampledFunction transpose_apply(const DistributionRep& t, const SmoothFunction& phi, const PairOptions& opts) {
  return SampledFunction(t, phi, opts);
}

EigenvalueResult eigenvalue_detail(const DistributionRep& t, const MultiIndex& alpha, const PairOptions& opts) {
  if (alpha.dim != t.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  require_clearance(t);
  SmoothTerm term{1.0, {}};
  for (int j = 0; j < t.dim(); ++j) term.axes.push_back(std::make_shared<InverseMonomialAxis>(alpha[j] + 1));
  SmoothFunction f(t.dim(), {term});
  EigenvalueResult r;
  r.value = pair(t, f, opts, &r.stats);
  return r;
}

double eigenvalue(const DistributionRep& t, const MultiIndex& alpha, const PairOptions& opts) {
  return eigenvalue_detail(t, alpha, opts).value;
}

EigenContext::EigenContext(const DistributionRep& t, const SmoothFunction& phi, const PairOptions& opts)
    : t_(t), phi_(phi), opts_(opts), psi_(t, phi, opts) {}

double EigenContext::moment(const SmoothFunction& f, std::size_t term, int axis, int k, bool absolute) const {
  int which = &f == &phi_ ? 0 : 1;
  auto key = std::make_tuple(which, term, axis, k, absolute);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = moments_.find(key);
    if (it != moments_.end()) return it->second;
  }
  const AxisFunction& g = *f.terms()[term].axes[static_cast<std::size_t>(axis)];
  double v = 0.0;
  if (!g.vanishes()) {
    if (!g.bounded()) fail(ErrorCode::InvalidArgument, "moment of a function with unbounded support");
    auto integrand = [&](double x) {
      double p = std::pow(x, k) * g.value(x);
      return absolute ? std::fabs(p) : p;
    };
    v = integrate_adaptive(integrand, g.lo(), g.hi(), opts_.quad).value;
  }
  std::lock_guard<std::mutex> lock(mu_);
  moments_.emplace(key, v);
  return v;
}

double EigenContext::scale(const MultiIndex& alpha) const {
  const int d = phi_.dim();
  if (phi_.terms().size() == 1) {
    double s = std::fabs(phi_.terms()[0].coefficient);
    for (int j = 0; j < d; ++j) s *= moment(phi_, 0, j, alpha[j], true);
    return s;
  }
  // |sum of products| is not separable: nested integration over the hull
  auto hull = phi_.support().hull();
  if (!hull) return 0.0;
  std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) interval_bounds(hull->sides[static_cast<std::size_t>(j)], lo[static_cast<std::size_t>(j)], hi[static_cast<std::size_t>(j)]);
  Point x(d);
  std::function<double(int)> nest = [&](int j) -> double {
    if (j == d) {
      double m = 1.0;
      for (int i = 0; i < d; ++i) m *= std::pow(x[i], alpha[i]);
      return std::fabs(m * phi_.value(x));
    }
    auto f = [&](double v) {
      x[j] = v;
      return nest(j + 1);
    };
    return integrate_adaptive(f, lo[static_cast<std::size_t>(j)], hi[static_cast<std::size_t>(j)], opts_.quad).value;
  };
  return nest(0);
}

EigenReport EigenContext::report(const MultiIndex& alpha, double tolerance) const {
  if (alpha.dim != t_.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  EigenReport r;
  r.alpha = alpha;
  auto ev = eigenvalue_detail(t_, alpha, opts_);
  r.eigenvalue = ev.value;
  r.truncation_radius = ev.stats.truncation_radius;
  const int d = t_.dim();
  auto integral = [&](const SmoothFunction& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.terms().size(); ++i) {
      double p = f.terms()[i].coefficient;
      for (int j = 0; j < d && p != 0.0; ++j) p *= moment(f, i, j, alpha[j], false);
      s += p;
    }
    return s;
  };
  double a = integral(phi_);
  double b = integral(psi_.smooth());
  r.residual = r.eigenvalue * a - b;
  r.scale = scale(alpha);
  r.tolerance = tolerance;
  r.pass = std::fabs(r.residual) <= tolerance * std::max(1.0, r.scale);
  return r;
}

EigenReport verify_monomial_eq(const DistributionRep& t, const MultiIndex& alpha, const SmoothFunction& phi,
                               double tolerance, const PairOptions& opts) {
  return EigenContext(t, phi, opts).report(alpha, tolerance);
}

double operator_apply(const DistributionRep& t, const DistributionRep& s, const SmoothFunction& phi,
                      const PairOptions& opts) {
  if (s.dim() != t.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  SampledFunction psi(t, phi, opts);
  return pair(s, psi.smooth(), opts);
}

double dilation_commutes(const DistributionRep& t, const SmoothFunction& phi, const Point& eta, const Point& y,
                         const PairOptions& opts) {
  if (eta.dim != t.dim() || y.dim != t.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  if (eta == Point::ones(eta.dim)) return 0.0;
  double lhs = transpose_apply(t, phi.dilated(eta), opts).value(y);
  double rhs = transpose_apply(t, phi, opts).value(eta * y);
  return std::fabs(lhs - rhs);
}

}  // namespace hadamard
