#include "hadamard/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <algorithm>
#include <sstream>

#include "hadamard/types.hpp"

namespace hadamard {

namespace {

GaussLegendreRule compute_rule(int n) {
  GaussLegendreRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

struct Panel {
  double a, b;
  double left, right;  // rule estimates on the two halves
  double abs_value;
  double err;  // |halves - whole|, 0 once below the roundoff floor
  int depth;
  double value() const { return left + right; }
};

struct ByError {
  const std::vector<Panel>* panels;
  bool operator()(std::size_t x, std::size_t y) const {
    const Panel& p = (*panels)[x];
    const Panel& q = (*panels)[y];
    if (p.err != q.err) return p.err < q.err;
    return p.a > q.a;  // leftmost first among ties
  }
};

class Integrator {
 public:
  Integrator(const std::function<double(double)>& f, const QuadratureOptions& o)
      : f_(f), opts_(o), rule_(gauss_legendre(10)) {}

  std::pair<double, double> rule(double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double v = 0.0, av = 0.0;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
      double x = mid + half * rule_.nodes[i];
      double fx = f_(x);
      if (!std::isfinite(fx)) {
        std::ostringstream os;
        os << "integrand not finite at x=" << x;
        fail(ErrorCode::QuadratureNoConvergence, os.str());
      }
      v += rule_.weights[i] * fx;
      av += rule_.weights[i] * std::fabs(fx);
    }
    evals_ += static_cast<long>(rule_.nodes.size());
    return {v * half, av * half};
  }

  Panel make(double a, double b, double whole, int depth) {
    double mid = 0.5 * (a + b);
    auto l = rule(a, mid), r = rule(mid, b);
    Panel p{a, b, l.first, r.first, l.second + r.second, std::fabs(l.first + r.first - whole), depth};
    if (p.err <= 64.0 * std::numeric_limits<double>::epsilon() * p.abs_value) p.err = 0.0;
    return p;
  }

  QuadratureResult run(double a, double b) {
    QuadratureResult res;
    if (!(b > a)) return res;
    constexpr int kInitial = 4;
    constexpr std::size_t kMaxPanels = 1u << 20;
    std::vector<Panel> panels;
    double w = (b - a) / kInitial;
    for (int i = 0; i < kInitial; ++i) {
      double pa = a + i * w, pb = (i + 1 == kInitial) ? b : a + (i + 1) * w;
      panels.push_back(make(pa, pb, rule(pa, pb).first, 1));
    }
    ByError cmp{&panels};
    std::priority_queue<std::size_t, std::vector<std::size_t>, ByError> heap(cmp);
    double err = 0.0, abs_total = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      heap.push(i);
      err += panels[i].err;
      abs_total += panels[i].abs_value;
    }
    while (true) {
      double target = std::max(opts_.abs_tol, opts_.rel_tol * abs_total);
      if (err <= target) break;
      std::size_t worst = heap.top();
      heap.pop();
      Panel p = panels[worst];
      if (p.depth >= opts_.max_depth || panels.size() >= kMaxPanels) {
        std::ostringstream os;
        os << "tolerance " << target << " not reached on [" << p.a << "," << p.b << "] after " << p.depth
           << " bisections";
        fail(ErrorCode::QuadratureNoConvergence, os.str());
      }
      double mid = 0.5 * (p.a + p.b);
      panels[worst] = make(p.a, mid, p.left, p.depth + 1);
      panels.push_back(make(mid, p.b, p.right, p.depth + 1));
      err += panels[worst].err + panels.back().err - p.err;
      abs_total += panels[worst].abs_value + panels.back().abs_value - p.abs_value;
      if (err < 0.0) err = 0.0;
      heap.push(worst);
      heap.push(panels.size() - 1);
    }
    res.error_estimate = err;
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double sum = 0.0, comp = 0.0;
    for (const auto& p : panels) {
      // Neumaier summation
      double v = p.value();
      double t = sum + v;
      if (std::fabs(sum) >= std::fabs(v))
        comp += (sum - t) + v;
      else
        comp += (v - t) + sum;
      sum = t;
    }
    res.value = sum + comp;
    res.evaluations = evals_;
    return res;
  }

 private:
  const std::function<double(double)>& f_;
  QuadratureOptions opts_;
  const GaussLegendreRule& rule_;
  long evals_ = 0;
};

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  if (n < 1 || n > 256) fail(ErrorCode::InvalidArgument, "Gauss-Legendre order out of range");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts) {
  if (!std::isfinite(a) || !std::isfinite(b))
    fail(ErrorCode::InvalidArgument, "adaptive quadrature needs finite limits");
  if (b < a) {
    auto r = integrate_adaptive(f, b, a, opts);
    r.value = -r.value;
    return r;
  }
  Integrator in(f, opts);
  return in.run(a, b);
}

}  // namespace hadamard
