#include "hadamard/functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace hadamard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Jet = std::array<double, kMaxJetOrder + 1>;

double factorial(int k) {
  static const std::array<double, 171> table = [] {
    std::array<double, 171> t{};
    t[0] = 1.0;
    for (int i = 1; i < 171; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * i;
    return t;
  }();
  return table[static_cast<std::size_t>(k)];
}

double ipow(double x, int n) {
  double r = 1.0;
  bool neg = n < 0;
  unsigned m = static_cast<unsigned>(neg ? -n : n);
  double b = x;
  while (m) {
    if (m & 1u) r *= b;
    b *= b;
    m >>= 1u;
  }
  return neg ? 1.0 / r : r;
}

void check_order(int k, int max, const char* what) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "negative derivative order");
  if (k > max) {
    std::ostringstream os;
    os << what << " supplies derivatives up to order " << max << ", order " << k << " requested";
    fail(ErrorCode::UnderivableOrder, os.str());
  }
}

// Coefficients of P_k with g^(k)(u) = P_k(u) g(u) / (1-u^2)^(2k), g = exp(-1/(1-u^2)).
const std::vector<std::vector<double>>& bump_polynomials() {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> p(kMaxJetOrder + 1);
    p[0] = {1.0};
    for (int k = 0; k < kMaxJetOrder; ++k) {
      const auto& a = p[static_cast<std::size_t>(k)];
      std::vector<double> next(a.size() + 3, 0.0);
      // P' (1 - 2u^2 + u^4)
      for (std::size_t i = 1; i < a.size(); ++i) {
        double d = a[i] * static_cast<double>(i);
        next[i - 1] += d;
        next[i + 1] -= 2.0 * d;
        next[i + 3] += d;
      }
      // 4k u (1 - u^2) P - 2u P
      for (std::size_t i = 0; i < a.size(); ++i) {
        next[i + 1] += (4.0 * k - 2.0) * a[i];
        next[i + 3] -= 4.0 * k * a[i];
      }
      while (next.size() > 1 && next.back() == 0.0) next.pop_back();
      p[static_cast<std::size_t>(k + 1)] = std::move(next);
    }
    return p;
  }();
  return table;
}

double horner(const std::vector<double>& c, double u) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * u + *it;
  return s;
}

// exp(-1/t) as a jet in the jet variable t.
void jet_inv_exp(const double* t, int n, double* out) {
  if (t[0] <= 0.0 || -1.0 / t[0] < -745.0) {
    std::fill(out, out + n + 1, 0.0);
    return;
  }
  Jet r{}, neg{};
  jet_reciprocal(t, n, r.data());
  for (int k = 0; k <= n; ++k) neg[static_cast<std::size_t>(k)] = -r[static_cast<std::size_t>(k)];
  jet_exp(neg.data(), n, out);
}

}  // namespace

double falling_factorial(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a - i;
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

long long stirling2(int n, int k) {
  if (n < 0 || n > 20) fail(ErrorCode::OrderTooLarge, "Stirling number order out of range");
  static const auto table = [] {
    std::array<std::array<long long, 21>, 21> t{};
    t[0][0] = 1;
    for (std::size_t i = 1; i < 21; ++i)
      for (std::size_t j = 1; j <= i; ++j) t[i][j] = static_cast<long long>(j) * t[i - 1][j] + t[i - 1][j - 1];
    return t;
  }();
  if (k < 0 || k > n) return 0;
  return table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

void jet_mul(const double* a, const double* b, int n, double* out) {
  Jet r{};
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
    r[static_cast<std::size_t>(k)] = s;
  }
  std::copy(r.begin(), r.begin() + n + 1, out);
}

void jet_exp(const double* a, int n, double* out) {
  Jet e{};
  e[0] = std::exp(a[0]);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * e[static_cast<std::size_t>(k - j)];
    e[static_cast<std::size_t>(k)] = s / k;
  }
  std::copy(e.begin(), e.begin() + n + 1, out);
}

void jet_reciprocal(const double* a, int n, double* out) {
  Jet r{};
  r[0] = 1.0 / a[0];
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += a[j] * r[static_cast<std::size_t>(k - j)];
    r[static_cast<std::size_t>(k)] = -s / a[0];
  }
  std::copy(r.begin(), r.begin() + n + 1, out);
}

Envelope AxisFunction::envelope(double r, int) const {
  if (vanishes()) return {};
  if (bounded() && r > std::max(std::fabs(lo()), std::fabs(hi()))) return {};
  fail(ErrorCode::InvalidArgument, "function has no tail envelope on its unbounded support");
}

bool AxisFunction::bounded() const { return vanishes() || (std::isfinite(lo()) && std::isfinite(hi())); }

double JetFactor::derivative(double x, int k) const {
  check_order(k, max_order(), "factor");
  Jet j{};
  taylor(x, k, j.data());
  return j[static_cast<std::size_t>(k)] * factorial(k);
}

PolynomialFactor::PolynomialFactor(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  for (double c : coeffs_)
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "polynomial coefficient not finite");
}

void PolynomialFactor::taylor(double x, int n, double* out) const {
  const int deg = static_cast<int>(coeffs_.size()) - 1;
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int i = deg; i >= k; --i) s = s * x + coeffs_[static_cast<std::size_t>(i)] * binomial(i, k);
    out[k] = s;
  }
}

double PolynomialFactor::lo() const { return coeffs_.empty() ? kInf : -kInf; }
double PolynomialFactor::hi() const { return coeffs_.empty() ? -kInf : kInf; }

Envelope PolynomialFactor::envelope(double r, int k) const {
  // |x| >= r >= 1: |sum_i c_i (i)_k x^(i-k)| <= sum |c_i (i)_k| |x|^(deg-k)
  Envelope e;
  const int deg = static_cast<int>(coeffs_.size()) - 1;
  if (deg < k) return e;
  for (int i = k; i <= deg; ++i) e.scale += std::fabs(coeffs_[static_cast<std::size_t>(i)] * falling_factorial(i, k));
  e.power = deg - k;
  (void)r;
  return e;
}

BumpFactor::BumpFactor(double center, double radius) : c_(center), r_(radius) {
  if (!std::isfinite(center) || !(radius > 0.0) || !std::isfinite(radius))
    fail(ErrorCode::InvalidArgument, "bump needs a finite center and positive finite radius");
}

double BumpFactor::derivative_closed_form(double x, int k) const {
  check_order(k, max_order(), "bump");
  double u = (x - c_) / r_;
  if (!(std::fabs(u) < 1.0)) return 0.0;
  double q = 1.0 - u * u;
  double expo = -1.0 / q - 2.0 * k * std::log(q);
  if (expo < -745.0) return 0.0;
  const auto& p = bump_polynomials()[static_cast<std::size_t>(k)];
  return horner(p, u) * std::exp(expo) / ipow(r_, k);
}

void BumpFactor::taylor(double x, int n, double* out) const {
  double u = (x - c_) / r_;
  if (!(std::fabs(u) < 1.0)) {
    std::fill(out, out + n + 1, 0.0);
    return;
  }
  Jet q{};
  q[0] = 1.0 - u * u;
  if (n >= 1) q[1] = -2.0 * u / r_;
  if (n >= 2) q[2] = -1.0 / (r_ * r_);
  jet_inv_exp(q.data(), n, out);
}

PlateauFactor::PlateauFactor(double center, double inner, double outer)
    : c_(center), inner_(inner), outer_(outer) {
  if (!std::isfinite(center) || !(inner >= 0.0) || !(outer > inner) || !std::isfinite(outer))
    fail(ErrorCode::InvalidArgument, "plateau needs 0 <= inner < outer");
}

void PlateauFactor::taylor(double x, int n, double* out) const {
  double s0 = std::fabs(x - c_);
  std::fill(out, out + n + 1, 0.0);
  if (s0 <= inner_) {
    out[0] = 1.0;
    return;
  }
  if (s0 >= outer_) return;
  double sgn = x >= c_ ? 1.0 : -1.0;
  Jet a{}, b{}, fa{}, fb{}, den{}, inv{};
  a[0] = outer_ - s0;
  a[1] = -sgn;
  b[0] = s0 - inner_;
  b[1] = sgn;
  jet_inv_exp(a.data(), n, fa.data());
  jet_inv_exp(b.data(), n, fb.data());
  for (int k = 0; k <= n; ++k) den[static_cast<std::size_t>(k)] = fa[static_cast<std::size_t>(k)] + fb[static_cast<std::size_t>(k)];
  if (den[0] == 0.0) return;
  jet_reciprocal(den.data(), n, inv.data());
  jet_mul(fa.data(), inv.data(), n, out);
}

ProductAxis::ProductAxis(std::vector<JetFactorPtr> factors, int max_order)
    : factors_(std::move(factors)), max_order_(std::min(max_order, kMaxJetOrder)), lo_(-kInf), hi_(kInf) {
  if (factors_.empty()) fail(ErrorCode::InvalidArgument, "empty factor list");
  for (const auto& f : factors_) {
    lo_ = std::max(lo_, f->lo());
    hi_ = std::min(hi_, f->hi());
  }
  if (lo_ > hi_) {
    lo_ = kInf;
    hi_ = -kInf;
  }
}

double ProductAxis::derivative(double x, int k) const {
  check_order(k, max_order_, "test function");
  if (x < lo_ || x > hi_) return 0.0;
  if (factors_.size() == 1 && k != 0) return factors_[0]->derivative(x, k);
  Jet acc{}, cur{};
  factors_[0]->taylor(x, k, acc.data());
  for (std::size_t i = 1; i < factors_.size(); ++i) {
    factors_[i]->taylor(x, k, cur.data());
    jet_mul(acc.data(), cur.data(), k, acc.data());
  }
  return acc[static_cast<std::size_t>(k)] * factorial(k);
}

Envelope ProductAxis::envelope(double r, int k) const {
  if (bounded()) return AxisFunction::envelope(r, k);
  // Only products of polynomials are unbounded. Leibniz over pairs is
  // handled by multiplying out into a single polynomial.
  std::vector<double> c{1.0};
  for (const auto& f : factors_) {
    auto* p = dynamic_cast<const PolynomialFactor*>(f.get());
    if (!p) return AxisFunction::envelope(r, k);
    std::vector<double> next(c.size() + p->coeffs().size(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < p->coeffs().size(); ++j) next[i + j] += c[i] * p->coeffs()[j];
    c = std::move(next);
  }
  return PolynomialFactor(c).envelope(r, k);
}

DilatedAxis::DilatedAxis(AxisFunctionPtr base, double y, int g) : base_(std::move(base)), y_(y), g_(g) {
  if (g < 0) fail(ErrorCode::InvalidArgument, "negative derivative order");
  if (g > base_->max_order()) check_order(g, base_->max_order(), "test function");
  double blo = base_->lo(), bhi = base_->hi();
  if (base_->vanishes()) {
    lo_ = kInf;
    hi_ = -kInf;
  } else if (y_ == 0.0) {
    bool hit = blo <= 0.0 && bhi >= 0.0 && base_->derivative(0.0, g_) != 0.0;
    lo_ = hit ? -kInf : kInf;
    hi_ = hit ? kInf : -kInf;
  } else if (y_ > 0.0) {
    lo_ = blo / y_;
    hi_ = bhi / y_;
  } else {
    lo_ = bhi / y_;
    hi_ = blo / y_;
  }
}

double DilatedAxis::derivative(double x, int k) const {
  check_order(k, max_order(), "dilated test function");
  if (x < lo_ || x > hi_) return 0.0;
  // d^k/dx^k [x^g f^(g)(x y)] = sum_i C(k,i) (g)_i x^(g-i) y^(k-i) f^(g+k-i)(x y)
  double xy = x * y_;
  double s = 0.0;
  for (int i = 0; i <= std::min(k, g_); ++i) {
    double yk = ipow(y_, k - i);
    if (yk == 0.0) continue;
    s += binomial(k, i) * falling_factorial(g_, i) * ipow(x, g_ - i) * yk * base_->derivative(xy, g_ + k - i);
  }
  return s;
}

Envelope DilatedAxis::envelope(double r, int k) const {
  if (vanishes()) return {};
  if (y_ == 0.0) {
    if (k > g_) return {};
    return {falling_factorial(g_, k) * std::fabs(base_->derivative(0.0, g_)), static_cast<double>(g_ - k)};
  }
  if (bounded()) return AxisFunction::envelope(r, k);
  double ay = std::fabs(y_);
  if (r * ay < 1.0) fail(ErrorCode::InvalidArgument, "tail radius too small for dilated envelope");
  Envelope out;
  std::vector<std::pair<double, double>> parts;
  for (int i = 0; i <= std::min(k, g_); ++i) {
    Envelope b = base_->envelope(r * ay, g_ + k - i);
    double sc = binomial(k, i) * falling_factorial(g_, i) * ipow(ay, k - i) * b.scale * std::pow(ay, b.power);
    double pw = g_ - i + b.power;
    parts.emplace_back(sc, pw);
    out.power = i == 0 ? pw : std::max(out.power, pw);
  }
  for (auto& [sc, pw] : parts) out.scale += sc;
  return out;
}

InverseMonomialAxis::InverseMonomialAxis(int p) : p_(p) {
  if (p < 1) fail(ErrorCode::InvalidArgument, "inverse monomial exponent must be >= 1");
}

double InverseMonomialAxis::derivative(double x, int k) const {
  check_order(k, max_order(), "inverse monomial");
  double v = falling_factorial(-p_, k) * ipow(x, -p_ - k);
  return x < 0.0 ? -v : v;
}

double InverseMonomialAxis::lo() const { return -kInf; }
double InverseMonomialAxis::hi() const { return kInf; }

Envelope InverseMonomialAxis::envelope(double, int k) const {
  return {std::fabs(falling_factorial(-p_, k)), static_cast<double>(-p_ - k)};
}

SmoothFunction::SmoothFunction(int dim, std::vector<SmoothTerm> terms) : dim_(dim), terms_(std::move(terms)) {
  check_dimension(dim);
  for (const auto& t : terms_) {
    if (static_cast<int>(t.axes.size()) != dim)
      fail(ErrorCode::InvalidArgument, "smooth term has wrong number of axis factors");
    if (!std::isfinite(t.coefficient)) fail(ErrorCode::InvalidArgument, "coefficient not finite");
    for (const auto& a : t.axes)
      if (!a) fail(ErrorCode::InvalidArgument, "missing axis factor");
  }
}

int SmoothFunction::max_order() const {
  int m = std::numeric_limits<int>::max();
  for (const auto& t : terms_)
    for (const auto& a : t.axes) m = std::min(m, a->max_order());
  return terms_.empty() ? kMaxJetOrder : m;
}

double SmoothFunction::value(const Point& x) const { return derivative(x, MultiIndex(dim_)); }

double SmoothFunction::derivative(const Point& x, const MultiIndex& beta) const {
  if (x.dim != dim_ || beta.dim != dim_) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  double s = 0.0;
  for (const auto& t : terms_) {
    double p = t.coefficient;
    for (int j = 0; j < dim_ && p != 0.0; ++j) p *= t.axes[static_cast<std::size_t>(j)]->derivative(x[j], beta[j]);
    s += p;
  }
  return s;
}

namespace {
Interval hull_interval(double lo, double hi) {
  XReal a = std::isfinite(lo) ? XReal(to_rational(lo)) : XReal::neg_inf();
  XReal b = std::isfinite(hi) ? XReal(to_rational(hi)) : XReal::pos_inf();
  return Interval::make(a, true, b, true);
}
}  // namespace

Region SmoothFunction::support() const {
  std::vector<Box> boxes;
  for (const auto& t : terms_) {
    if (t.coefficient == 0.0) continue;
    Box b;
    bool empty = false;
    for (const auto& a : t.axes) {
      if (a->vanishes()) {
        empty = true;
        break;
      }
      b.sides.push_back(hull_interval(a->lo(), a->hi()));
    }
    if (!empty) boxes.push_back(std::move(b));
  }
  return simplify(Region(dim_, std::move(boxes)));
}

bool SmoothFunction::compact() const {
  for (const auto& t : terms_) {
    bool zero = false, unbounded = false;
    for (const auto& a : t.axes) {
      if (a->vanishes()) zero = true;
      else if (!a->bounded()) unbounded = true;
    }
    if (unbounded && !zero && t.coefficient != 0.0) return false;
  }
  return true;
}

SmoothFunction SmoothFunction::dilated(const Point& eta) const {
  if (eta.dim != dim_) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  for (int j = 0; j < dim_; ++j)
    if (eta[j] == 0.0 || !std::isfinite(eta[j]))
      fail(ErrorCode::InvalidArgument, "dilation factor must be finite and nonzero");
  std::vector<SmoothTerm> out;
  for (const auto& t : terms_) {
    SmoothTerm n{t.coefficient, {}};
    for (int j = 0; j < dim_; ++j)
      n.axes.push_back(std::make_shared<DilatedAxis>(t.axes[static_cast<std::size_t>(j)], eta[j], 0));
    out.push_back(std::move(n));
  }
  return SmoothFunction(dim_, std::move(out));
}

JetFactorPtr make_factor(const FactorSpec& spec) {
  switch (spec.kind) {
    case FactorSpec::Kind::Polynomial: return std::make_shared<PolynomialFactor>(spec.coeffs);
    case FactorSpec::Kind::Bump: return std::make_shared<BumpFactor>(spec.center, spec.radius);
    case FactorSpec::Kind::Plateau: return std::make_shared<PlateauFactor>(spec.center, spec.inner, spec.radius);
  }
  fail(ErrorCode::InvalidArgument, "unknown factor kind");
}

TestFunction::TestFunction(int dim, std::vector<TestTermSpec> terms, int max_derivative_order)
    : specs_(std::move(terms)), max_order_(max_derivative_order) {
  check_dimension(dim);
  if (max_order_ < 0 || max_order_ > kMaxJetOrder)
    fail(ErrorCode::InvalidArgument, "max_order must be in 0.." + std::to_string(kMaxJetOrder));
  if (specs_.empty()) fail(ErrorCode::InvalidArgument, "test function needs at least one term");
  std::vector<SmoothTerm> built;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    if (static_cast<int>(s.factors.size()) != dim)
      fail(ErrorCode::InvalidArgument, "test function term " + std::to_string(i) + " needs one factor list per coordinate");
    SmoothTerm t{s.coefficient, {}};
    for (int j = 0; j < dim; ++j) {
      const auto& list = s.factors[static_cast<std::size_t>(j)];
      if (list.empty())
        fail(ErrorCode::InvalidArgument, "test function term " + std::to_string(i) + " has an empty factor list");
      std::vector<JetFactorPtr> fs;
      for (const auto& f : list) fs.push_back(make_factor(f));
      auto axis = std::make_shared<ProductAxis>(std::move(fs), max_order_);
      if (!axis->bounded())
        fail(ErrorCode::InvalidArgument, "test function term " + std::to_string(i) + ", coordinate " +
                                             std::to_string(j) + ": no bump or plateau factor, support unbounded");
      t.axes.push_back(std::move(axis));
    }
    built.push_back(std::move(t));
  }
  dim_ = dim;
  terms_ = std::move(built);
  SmoothFunction check(dim_, terms_);
  (void)check;
}

TestFunction TestFunction::bump(const Point& center, const Point& radius, int max_order) {
  if (center.dim != radius.dim) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  TestTermSpec t;
  for (int j = 0; j < center.dim; ++j) {
    FactorSpec f;
    f.kind = FactorSpec::Kind::Bump;
    f.center = center[j];
    f.radius = radius[j];
    t.factors.push_back({f});
  }
  return TestFunction(center.dim, {t}, max_order);
}

}  // namespace hadamard
