#include "hadamard/euler.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace hadamard {

EulerPolynomial::EulerPolynomial(int dim, std::map<MultiIndex, double> coeffs) : dim_(dim) {
  check_dimension(dim);
  for (const auto& [beta, c] : coeffs) {
    if (beta.dim != dim) fail(ErrorCode::InvalidArgument, "Euler polynomial multi-index has wrong dimension");
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "Euler polynomial coefficient not finite");
    if (c != 0.0) coeffs_[beta] += c;
  }
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (it->second == 0.0) it = coeffs_.erase(it);
    else ++it;
  }
  if (coeffs_.empty()) fail(ErrorCode::InvalidArgument, "Euler polynomial has no nonzero coefficient");
}

EulerPolynomial EulerPolynomial::constant(int dim, double c) { return EulerPolynomial(dim, {{MultiIndex(dim), c}}); }

EulerPolynomial EulerPolynomial::theta(int dim, int j) {
  if (j < 0 || j >= dim) fail(ErrorCode::InvalidArgument, "theta coordinate out of range");
  MultiIndex b(dim);
  b[j] = 1;
  return EulerPolynomial(dim, {{b, 1.0}});
}

MultiIndex EulerPolynomial::degree() const {
  MultiIndex m(dim_);
  for (const auto& [beta, c] : coeffs_)
    for (int j = 0; j < dim_; ++j) m[j] = std::max(m[j], beta[j]);
  return m;
}

double EulerPolynomial::evaluate(const MultiIndex& alpha) const {
  if (alpha.dim != dim_) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  double s = 0.0;
  for (const auto& [beta, c] : coeffs_) {
    double t = c;
    for (int j = 0; j < dim_; ++j) t *= std::pow(static_cast<double>(alpha[j]), beta[j]);
    s += t;
  }
  return s;
}

std::string EulerPolynomial::str() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [beta, c] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int j = 0; j < dim_; ++j)
      if (beta[j] > 0) os << "*theta" << (j + 1) << (beta[j] > 1 ? "^" + std::to_string(beta[j]) : "");
  }
  return os.str();
}

std::map<MultiIndex, long long> theta_expand(const MultiIndex& beta) {
  for (int j = 0; j < beta.dim; ++j)
    if (beta[j] > 12 || beta[j] < 0)
      fail(ErrorCode::OrderTooLarge, "theta power " + std::to_string(beta[j]) + " exceeds the limit 12");
  std::map<MultiIndex, long long> out;
  MultiIndex g(beta.dim);
  // tensor product of the one-dimensional expansions, gamma_j in 1..beta_j (0 when beta_j = 0)
  std::function<void(int, long long)> rec = [&](int j, long long c) {
    if (j == beta.dim) {
      out[g] = c;
      return;
    }
    int lo = beta[j] == 0 ? 0 : 1;
    for (int k = lo; k <= beta[j]; ++k) {
      g[j] = k;
      rec(j + 1, c * stirling2(beta[j], k));
    }
  };
  rec(0, 1);
  return out;
}

std::map<MultiIndex, double> derivative_form(const EulerPolynomial& p) {
  std::map<MultiIndex, double> out;
  for (const auto& [beta, c] : p.coeffs())
    for (const auto& [gamma, s] : theta_expand(beta)) out[gamma] += c * static_cast<double>(s);
  return out;
}

double apply_euler(const EulerPolynomial& p, const SmoothFunction& phi, const Point& x) {
  if (phi.dim() != p.dim() || x.dim != p.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  double s = 0.0;
  for (const auto& [gamma, c] : derivative_form(p)) {
    if (c == 0.0) continue;
    double xg = 1.0;
    for (int j = 0; j < p.dim(); ++j) xg *= std::pow(x[j], gamma[j]);
    s += c * xg * phi.derivative(x, gamma);
  }
  return s;
}

double euler_eigenvalue(const EulerPolynomial& p, const MultiIndex& alpha) { return p.evaluate(alpha); }

EulerPolynomial transpose(const EulerPolynomial& p) {
  // prod_j (-(theta_j + 1))^b_j = prod_j (-1)^b_j sum_i C(b_j, i) theta_j^i
  std::map<MultiIndex, double> out;
  for (const auto& [beta, c] : p.coeffs()) {
    std::map<MultiIndex, double> partial{{MultiIndex(p.dim()), c}};
    for (int j = 0; j < p.dim(); ++j) {
      std::map<MultiIndex, double> next;
      double sign = beta[j] % 2 ? -1.0 : 1.0;
      for (const auto& [m, v] : partial)
        for (int i = 0; i <= beta[j]; ++i) {
          MultiIndex n = m;
          n[j] = i;
          next[n] += v * sign * binomial(beta[j], i);
        }
      partial = std::move(next);
    }
    for (const auto& [m, v] : partial) out[m] += v;
  }
  return EulerPolynomial(p.dim(), out);
}

DistributionRep euler_to_hadamard(const EulerPolynomial& p) {
  // T = sum_gamma b_gamma delta_1^(gamma) acts as y -> sum_gamma b_gamma (-1)^|gamma| y^gamma phi^(gamma)(y),
  // which must equal P(-theta-1) phi; match against its derivative form.
  std::vector<PointMass> terms;
  RPoint one(static_cast<std::size_t>(p.dim()), Rational(1));
  for (const auto& [gamma, c] : derivative_form(transpose(p))) {
    if (c == 0.0) continue;
    double b = gamma.total() % 2 ? -c : c;
    terms.push_back(PointMass{one, gamma, b});
  }
  return DistributionRep::point_masses(p.dim(), std::move(terms));
}

}  // namespace hadamard
