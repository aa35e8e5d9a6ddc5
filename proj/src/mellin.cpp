#include "hadamard/mellin.hpp"

#include "parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace hadamard {

namespace {

constexpr double kSnap = 1e-9;

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwFree>;
using CplxBuf = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuf real_buf(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (!p) fail(ErrorCode::InvalidArgument, "FFT buffer allocation failed");
  std::fill(p, p + n, 0.0);
  return RealBuf(p);
}

CplxBuf cplx_buf(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) fail(ErrorCode::InvalidArgument, "FFT buffer allocation failed");
  std::fill(reinterpret_cast<double*>(p), reinterpret_cast<double*>(p) + 2 * n, 0.0);
  return CplxBuf(p);
}

// One pair of r2c / c2r plans for a fixed shape. Planning is not thread-safe
// in FFTW, execution on fresh buffers of the same alignment is.
class FftPlans {
 public:
  FftPlans(int dim, int n) : dim_(dim) {
    for (int j = 0; j < dim; ++j) dims_[static_cast<std::size_t>(j)] = n;
    real_ = 1;
    for (int j = 0; j < dim; ++j) real_ *= static_cast<std::size_t>(n);
    cplx_ = real_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
    auto in = real_buf(real_);
    auto out = cplx_buf(cplx_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c(dim, dims_.data(), in.get(), out.get(), FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r(dim, dims_.data(), out.get(), in.get(), FFTW_ESTIMATE);
    if (!fwd_ || !inv_) fail(ErrorCode::InvalidArgument, "FFT planning failed");
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  std::size_t real_size() const { return real_; }
  std::size_t cplx_size() const { return cplx_; }
  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(fwd_, in, out); }
  void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inv_, in, out); }

 private:
  int dim_;
  std::array<int, kMaxDim> dims_{};
  std::size_t real_ = 0, cplx_ = 0;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

struct Span {
  int sign = 1;
  double ua = 0.0, ub = 0.0;  // log|x| range
};

Span log_span(const Interval& iv) {
  double lo, hi;
  interval_bounds(iv, lo, hi);
  if (!std::isfinite(lo) || !std::isfinite(hi))
    fail(ErrorCode::InvalidArgument, "fast convolution needs bounded supports, got side " + iv.str());
  if (lo > 0.0) return {1, std::log(lo), std::log(hi)};
  if (hi < 0.0) return {-1, std::log(-hi), std::log(-lo)};
  fail(ErrorCode::InvalidArgument, "support side " + iv.str() + " meets 0");
}

bool degenerate(const DensityTerm& t) {
  for (const auto& s : t.box.sides)
    if (s.lo == s.hi) return true;
  return false;
}

void log_range(const Density& d, std::array<double, kMaxDim>& lo, std::array<double, kMaxDim>& hi) {
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& t : d.terms()) {
    if (degenerate(t)) continue;
    for (int j = 0; j < d.dim(); ++j) {
      auto s = log_span(t.box.sides[static_cast<std::size_t>(j)]);
      auto uj = static_cast<std::size_t>(j);
      lo[uj] = std::min(lo[uj], s.ua);
      hi[uj] = std::max(hi[uj], s.ub);
    }
  }
  if (!(lo[0] < hi[0])) fail(ErrorCode::EmptyRegion, "density has no term of positive measure");
}

// int_{-inf}^x of the unit hat function
double hat_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x <= 0.0) return 0.5 * (x + 1.0) * (x + 1.0);
  if (x < 1.0) return 1.0 - 0.5 * (1.0 - x) * (1.0 - x);
  return 1.0;
}

// Samples of one factor on one axis: the piecewise-linear integration weights
// of the support interval times the kernel. A support end on a node is a
// jump; there the left limit goes to `minus` and the right limit to `plus`.
struct AxisSamples {
  long first = 0;
  std::vector<double> minus, plus;
};

AxisSamples axis_samples(const Kernel& k, const Span& sp, double origin, double h, int n) {
  double pa = (sp.ua - origin) / h, pb = (sp.ub - origin) / h;
  double ra = std::round(pa), rb = std::round(pb);
  bool a_node = std::fabs(pa - ra) <= kSnap, b_node = std::fabs(pb - rb) <= kSnap;
  if (a_node) pa = ra;
  if (b_node) pb = rb;
  if (pb - pa < 2.0)
    fail(ErrorCode::GridTooCoarse, "support side spans fewer than two grid steps in log|x|");
  long i0 = static_cast<long>(std::floor(pa)), i1 = static_cast<long>(std::ceil(pb));
  if (i0 < 0 || i1 > n - 1) fail(ErrorCode::InvalidArgument, "log grid does not cover the support");
  AxisSamples out;
  out.first = i0;
  out.minus.assign(static_cast<std::size_t>(i1 - i0 + 1), 0.0);
  out.plus = out.minus;
  for (long i = i0; i <= i1; ++i) {
    double w = hat_cdf(pb - static_cast<double>(i)) - hat_cdf(pa - static_cast<double>(i));
    if (w == 0.0) continue;
    double ext = k.value(sp.sign * std::exp(origin + static_cast<double>(i) * h));
    double m = w * ext, p = w * ext;
    if (a_node && i == static_cast<long>(ra)) {
      m = 0.0;
      p = 2.0 * w * ext;
    } else if (b_node && i == static_cast<long>(rb)) {
      m = 2.0 * w * ext;
      p = 0.0;
    }
    out.minus[static_cast<std::size_t>(i - i0)] = m;
    out.plus[static_cast<std::size_t>(i - i0)] = p;
  }
  return out;
}

unsigned quadrant_key(const std::array<int, kMaxDim>& signs, int d) {
  unsigned k = 0;
  for (int j = 0; j < d; ++j)
    if (signs[static_cast<std::size_t>(j)] < 0) k |= 1u << j;
  return k;
}

std::array<int, kMaxDim> key_signs(unsigned k, int d) {
  std::array<int, kMaxDim> s{};
  for (int j = 0; j < d; ++j) s[static_cast<std::size_t>(j)] = (k >> j) & 1u ? -1 : 1;
  return s;
}

// Per quadrant and per one-sided pattern eps (bit j set: right limit on axis j),
// the dense sample array of a density on its log grid.
struct SampledSide {
  std::map<unsigned, std::vector<RealBuf>> arrays;  // quadrant -> [eps]
  std::array<long, kMaxDim> last{};                 // highest index that can be nonzero
};

SampledSide sample_side(const Density& d, const std::array<double, kMaxDim>& origin, const LogGrid& g,
                        std::size_t real_size) {
  const int dim = d.dim();
  const unsigned patterns = 1u << dim;
  SampledSide side;
  side.last.fill(0);
  for (const auto& term : d.terms()) {
    if (degenerate(term) || term.coefficient == 0.0) continue;
    std::array<int, kMaxDim> signs{};
    std::vector<AxisSamples> axes;
    for (int j = 0; j < dim; ++j) {
      auto uj = static_cast<std::size_t>(j);
      Span sp = log_span(term.box.sides[uj]);
      signs[uj] = sp.sign;
      axes.push_back(axis_samples(*term.factors[uj], sp, origin[uj], g.step[uj], g.n));
      side.last[uj] = std::max(side.last[uj], axes.back().first + static_cast<long>(axes.back().minus.size()) - 1);
    }
    auto& bufs = side.arrays[quadrant_key(signs, dim)];
    if (bufs.empty())
      for (unsigned e = 0; e < patterns; ++e) bufs.push_back(real_buf(real_size));
    for (unsigned e = 0; e < patterns; ++e) {
      double* a = bufs[e].get();
      auto pick = [&](int j) -> const std::vector<double>& {
        return (e >> j) & 1u ? axes[static_cast<std::size_t>(j)].plus : axes[static_cast<std::size_t>(j)].minus;
      };
      const auto n = static_cast<std::size_t>(g.n);
      if (dim == 1) {
        const auto& v = pick(0);
        for (std::size_t i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(axes[0].first) + i] += term.coefficient * v[i];
      } else if (dim == 2) {
        const auto &v0 = pick(0), &v1 = pick(1);
        for (std::size_t i = 0; i < v0.size(); ++i) {
          double c = term.coefficient * v0[i];
          if (c == 0.0) continue;
          std::size_t row = (static_cast<std::size_t>(axes[0].first) + i) * n + static_cast<std::size_t>(axes[1].first);
          for (std::size_t k = 0; k < v1.size(); ++k) a[row + k] += c * v1[k];
        }
      } else {
        const auto &v0 = pick(0), &v1 = pick(1), &v2 = pick(2);
        for (std::size_t i = 0; i < v0.size(); ++i)
          for (std::size_t k = 0; k < v1.size(); ++k) {
            double c = term.coefficient * v0[i] * v1[k];
            if (c == 0.0) continue;
            std::size_t row = ((static_cast<std::size_t>(axes[0].first) + i) * n +
                               static_cast<std::size_t>(axes[1].first) + k) *
                                  n +
                              static_cast<std::size_t>(axes[2].first);
            for (std::size_t l = 0; l < v2.size(); ++l) a[row + l] += c * v2[l];
          }
      }
    }
  }
  return side;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct RawResult {
  std::map<unsigned, std::vector<double>> values;
  std::array<int, kMaxDim> used{};
};

RawResult run_grid(const Density& s, const Density& t, const LogGrid& g, int workers) {
  const int d = g.dim;
  FftPlans plans(d, g.n);
  const std::size_t nr = plans.real_size(), nc = plans.cplx_size();
  SampledSide ss = sample_side(s, g.s_origin, g, nr);
  SampledSide ts = sample_side(t, g.t_origin, g, nr);
  RawResult out;
  for (int j = 0; j < d; ++j) {
    auto uj = static_cast<std::size_t>(j);
    long used = ss.last[uj] + ts.last[uj] + 1;
    if (used > g.n) fail(ErrorCode::InvalidArgument, "log grid too short: the product support would wrap around");
    out.used[uj] = static_cast<int>(used);
  }

  // forward transforms, in a fixed job order
  struct Job {
    double* in;
    fftw_complex* out;
  };
  std::vector<Job> jobs;
  std::map<unsigned, std::vector<CplxBuf>> fs, ft;
  for (auto& [q, bufs] : ss.arrays)
    for (auto& b : bufs) {
      fs[q].push_back(cplx_buf(nc));
      jobs.push_back({b.get(), fs[q].back().get()});
    }
  for (auto& [q, bufs] : ts.arrays)
    for (auto& b : bufs) {
      ft[q].push_back(cplx_buf(nc));
      jobs.push_back({b.get(), ft[q].back().get()});
    }
  detail::parallel_for(jobs.size(), workers, [&](std::size_t i) { plans.forward(jobs[i].in, jobs[i].out); });

  // result quadrant r collects every (qs, qt) with qs xor qt == r
  std::map<unsigned, std::vector<std::pair<unsigned, unsigned>>> pairs;
  for (const auto& a : fs)
    for (const auto& b : ft) pairs[a.first ^ b.first].emplace_back(a.first, b.first);
  std::vector<unsigned> keys;
  for (const auto& p : pairs) keys.push_back(p.first);
  for (unsigned k : keys) out.values[k].assign(nr, 0.0);

  const unsigned patterns = 1u << d;
  double scale = 1.0 / static_cast<double>(nr) / static_cast<double>(patterns);
  for (int j = 0; j < d; ++j) scale *= g.step[static_cast<std::size_t>(j)];
  detail::parallel_for(keys.size(), workers, [&](std::size_t idx) {
    unsigned r = keys[idx];
    auto acc = cplx_buf(nc);
    for (const auto& [qs, qt] : pairs.at(r)) {
      for (unsigned e = 0; e < patterns; ++e) {
        // left limits of s meet right limits of t and vice versa
        const fftw_complex* a = fs.at(qs)[e].get();
        const fftw_complex* b = ft.at(qt)[(patterns - 1) ^ e].get();
        for (std::size_t i = 0; i < nc; ++i) {
          acc[i][0] += a[i][0] * b[i][0] - a[i][1] * b[i][1];
          acc[i][1] += a[i][0] * b[i][1] + a[i][1] * b[i][0];
        }
      }
    }
    auto real = real_buf(nr);
    plans.inverse(acc.get(), real.get());
    auto& v = out.values.at(r);
    for (std::size_t i = 0; i < nr; ++i) v[i] = real[i] * scale;
  });
  return out;
}

// Flat index of a multi-index, last axis fastest.
std::size_t flat(const std::array<long, kMaxDim>& m, int d, int n) {
  std::size_t f = 0;
  for (int j = 0; j < d; ++j) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(m[static_cast<std::size_t>(j)]);
  return f;
}

template <class F>
void for_each_index(const std::array<int, kMaxDim>& used, int d, F&& f) {
  std::array<long, kMaxDim> m{};
  while (true) {
    f(m);
    int j = d - 1;
    while (j >= 0) {
      auto uj = static_cast<std::size_t>(j);
      if (++m[uj] < used[uj]) break;
      m[uj] = 0;
      --j;
    }
    if (j < 0) return;
  }
}

double raw_mass(const RawResult& r, const LogGrid& g) {
  double total = 0.0;
  for (const auto& [q, v] : r.values) {
    for_each_index(r.used, g.dim, [&](const std::array<long, kMaxDim>& m) {
      double jac = 1.0;
      for (int j = 0; j < g.dim; ++j) {
        auto uj = static_cast<std::size_t>(j);
        jac *= std::exp(g.origin(j) + static_cast<double>(m[uj]) * g.step[uj]) * g.step[uj];
      }
      total += v[flat(m, g.dim, g.n)] * jac;
    });
  }
  return total;
}

void check_inputs(const Density& s, const Density& t) {
  if (s.dim() != t.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  if (s.dim() < 1) fail(ErrorCode::InvalidArgument, "empty density");
}

}  // namespace

LogGrid LogGrid::refined() const {
  LogGrid g = *this;
  g.n = 2 * n;
  for (int j = 0; j < dim; ++j) g.step[static_cast<std::size_t>(j)] *= 0.5;
  return g;
}

LogGrid plan_grid(const Density& s, const Density& t, int n) {
  check_inputs(s, t);
  if (!power_of_two(n) || n < 16) fail(ErrorCode::InvalidArgument, "grid size must be a power of two >= 16");
  std::array<double, kMaxDim> slo, shi, tlo, thi;
  log_range(s, slo, shi);
  log_range(t, tlo, thi);
  LogGrid g;
  g.dim = s.dim();
  g.n = n;
  for (int j = 0; j < g.dim; ++j) {
    auto uj = static_cast<std::size_t>(j);
    double ls = shi[uj] - slo[uj], lt = thi[uj] - tlo[uj];
    double h0 = (ls + lt) / (n / 2 - 4);
    double wide = std::max(ls, lt);
    double k = std::ceil(wide / h0 - 1e-9);
    g.step[uj] = wide / k;
    g.s_origin[uj] = slo[uj];
    g.t_origin[uj] = tlo[uj];
  }
  return g;
}

MellinResult convolve_fast(const Density& s, const Density& t, const LogGrid& grid, const ConvolveOptions& opts) {
  check_inputs(s, t);
  if (grid.dim != s.dim()) fail(ErrorCode::InvalidArgument, "grid dimension mismatch");
  if (!power_of_two(grid.n) || grid.n < 16) fail(ErrorCode::InvalidArgument, "grid size must be a power of two >= 16");
  for (int j = 0; j < grid.dim; ++j)
    if (!(grid.step[static_cast<std::size_t>(j)] > 0.0)) fail(ErrorCode::InvalidArgument, "grid step must be positive");

  RawResult coarse = run_grid(s, t, grid, opts.workers);
  MellinResult res;
  res.grid = grid;
  res.used = coarse.used;
  res.total_mass = raw_mass(coarse, grid);
  if (opts.richardson) {
    LogGrid fine_grid = grid.refined();
    RawResult fine = run_grid(s, t, fine_grid, opts.workers);
    double peak = 0.0, gap = 0.0;
    for (auto& [q, v] : coarse.values) {
      auto it = fine.values.find(q);
      for_each_index(coarse.used, grid.dim, [&](const std::array<long, kMaxDim>& m) {
        std::array<long, kMaxDim> m2{};
        for (int j = 0; j < grid.dim; ++j) m2[static_cast<std::size_t>(j)] = 2 * m[static_cast<std::size_t>(j)];
        double c = v[flat(m, grid.dim, grid.n)];
        double f = it == fine.values.end() ? 0.0 : it->second[flat(m2, grid.dim, fine_grid.n)];
        peak = std::max(peak, std::fabs(c));
        gap = std::max(gap, std::fabs(f - c));
        v[flat(m, grid.dim, grid.n)] = (4.0 * f - c) / 3.0;
      });
    }
    res.discrepancy = peak > 0.0 ? gap / peak : gap;
    if (res.discrepancy > opts.coarse_tolerance) {
      std::ostringstream os;
      os << "grid of " << grid.n << " samples too coarse: n vs 2n discrepancy " << res.discrepancy << " exceeds "
         << opts.coarse_tolerance;
      fail(ErrorCode::GridTooCoarse, os.str());
    }
    res.total_mass = (4.0 * raw_mass(fine, fine_grid) - res.total_mass) / 3.0;
  }
  for (auto& [q, v] : coarse.values) {
    QuadrantSamples qs;
    qs.signs = key_signs(q, grid.dim);
    qs.values = std::move(v);
    res.quadrants.push_back(std::move(qs));
  }
  return res;
}

MellinResult convolve_fast(const Density& s, const Density& t, int n, const ConvolveOptions& opts) {
  return convolve_fast(s, t, plan_grid(s, t, n), opts);
}

double MellinResult::value_at(const Point& z) const {
  const int d = grid.dim;
  if (z.dim != d) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  std::array<int, kMaxDim> signs{};
  for (int j = 0; j < d; ++j) {
    if (z[j] == 0.0 || !std::isfinite(z[j])) return 0.0;
    signs[static_cast<std::size_t>(j)] = z[j] > 0 ? 1 : -1;
  }
  const QuadrantSamples* q = nullptr;
  for (const auto& c : quadrants)
    if (quadrant_key(c.signs, d) == quadrant_key(signs, d)) q = &c;
  if (!q) return 0.0;
  // per-axis interpolation nodes and weights
  std::array<std::vector<std::pair<long, double>>, kMaxDim> nodes;
  for (int j = 0; j < d; ++j) {
    auto uj = static_cast<std::size_t>(j);
    double p = (std::log(std::fabs(z[j])) - grid.origin(j)) / grid.step[uj];
    double last = static_cast<double>(used[uj] - 1);
    if (p < -kSnap || p > last + kSnap) return 0.0;
    double r = std::round(p);
    if (std::fabs(p - r) <= kSnap) {
      nodes[uj] = {{static_cast<long>(r), 1.0}};
      continue;
    }
    auto i = static_cast<long>(std::floor(p));
    double x = p - static_cast<double>(i);
    if (i >= 1 && i + 2 <= used[uj] - 1) {
      nodes[uj] = {{i - 1, -x * (x - 1) * (x - 2) / 6},
                   {i, (x + 1) * (x - 1) * (x - 2) / 2},
                   {i + 1, -(x + 1) * x * (x - 2) / 2},
                   {i + 2, (x + 1) * x * (x - 1) / 6}};
    } else {
      nodes[uj] = {{i, 1 - x}, {std::min<long>(i + 1, used[uj] - 1), x}};
    }
  }
  double v = 0.0;
  std::array<std::size_t, kMaxDim> pos{};
  while (true) {
    double w = 1.0;
    std::array<long, kMaxDim> m{};
    for (int j = 0; j < d; ++j) {
      auto uj = static_cast<std::size_t>(j);
      m[uj] = nodes[uj][pos[uj]].first;
      w *= nodes[uj][pos[uj]].second;
    }
    v += w * q->values[flat(m, d, grid.n)];
    int j = d - 1;
    while (j >= 0) {
      auto uj = static_cast<std::size_t>(j);
      if (++pos[uj] < nodes[uj].size()) break;
      pos[uj] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return v;
}

Point MellinResult::point(const QuadrantSamples& q, std::size_t index) const {
  Point p(grid.dim);
  for (int j = grid.dim - 1; j >= 0; --j) {
    auto uj = static_cast<std::size_t>(j);
    auto m = index % static_cast<std::size_t>(grid.n);
    index /= static_cast<std::size_t>(grid.n);
    p[j] = q.signs[uj] * std::exp(grid.origin(j) + static_cast<double>(m) * grid.step[uj]);
  }
  return p;
}

double convolve_oracle(const Density& s, const Density& t, const Point& z, const QuadratureOptions& opts) {
  check_inputs(s, t);
  const int d = s.dim();
  if (z.dim != d) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  for (int j = 0; j < d; ++j)
    if (z[j] == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& a : s.terms()) {
    for (const auto& b : t.terms()) {
      double prod = a.coefficient * b.coefficient;
      for (int j = 0; j < d && prod != 0.0; ++j) {
        auto uj = static_cast<std::size_t>(j);
        double alo, ahi, blo, bhi;
        interval_bounds(a.box.sides[uj], alo, ahi);
        interval_bounds(b.box.sides[uj], blo, bhi);
        if ((alo <= 0.0 && ahi >= 0.0) || (blo <= 0.0 && bhi >= 0.0))
          fail(ErrorCode::InvalidArgument, "oracle needs supports away from the coordinate hyperplanes");
        // z / y in [blo, bhi]  <=>  y between z / bhi and z / blo
        double y1 = z[j] / blo, y2 = std::isfinite(bhi) ? z[j] / bhi : 0.0;
        if (!std::isfinite(bhi) || !std::isfinite(blo)) {
          // an infinite end of the t side maps to y = 0, which the s side excludes
          double fin = std::isfinite(blo) ? z[j] / blo : z[j] / bhi;
          y1 = fin;
          y2 = 0.0;
        }
        double lo = std::max(alo, std::min(y1, y2)), hi = std::min(ahi, std::max(y1, y2));
        if (!(hi > lo)) {
          prod = 0.0;
          break;
        }
        const Kernel& ka = *a.factors[uj];
        const Kernel& kb = *b.factors[uj];
        double zj = z[j];
        auto f = [&](double y) { return ka.value(y) * kb.value(zj / y) / std::fabs(y); };
        prod *= integrate_adaptive(f, lo, hi, opts).value;
      }
      total += prod;
    }
  }
  return total;
}

double density_mass(const Density& s, const QuadratureOptions& opts) {
  double total = 0.0;
  for (const auto& term : s.terms()) {
    double prod = term.coefficient;
    for (int j = 0; j < s.dim() && prod != 0.0; ++j) {
      auto uj = static_cast<std::size_t>(j);
      double lo, hi;
      interval_bounds(term.box.sides[uj], lo, hi);
      const Kernel& k = *term.factors[uj];
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        double r = std::max({1.0, std::isfinite(lo) ? std::fabs(lo) : 0.0, std::isfinite(hi) ? std::fabs(hi) : 0.0});
        int i = 0;
        while (!(k.tail_moment(r, 0.0) <= opts.abs_tol * 1e-2)) {
          if (++i > 200) fail(ErrorCode::InvalidArgument, "mass of " + k.str() + " has no certified tail bound");
          r *= 2.0;
        }
        if (!std::isfinite(lo)) lo = -r;
        if (!std::isfinite(hi)) hi = r;
      }
      prod *= integrate_adaptive([&](double x) { return k.value(x); }, lo, hi, opts).value;
    }
    total += prod;
  }
  return total;
}

Density to_density(const MellinResult& r) {
  if (r.dim() != 1) fail(ErrorCode::InvalidArgument, "only one-dimensional results convert to a density");
  std::vector<DensityTerm> terms;
  const double h = r.grid.step[0], u0 = r.grid.origin(0);
  for (const auto& q : r.quadrants) {
    std::vector<double> v(q.values.begin(), q.values.begin() + r.used[0]);
    auto kernel = std::make_shared<TabulatedKernel>(q.signs[0], u0, h, v);
    terms.push_back({1.0, Box({Interval::closed(to_rational(kernel->lo()), to_rational(kernel->hi()))}), {kernel}});
  }
  if (terms.empty()) fail(ErrorCode::EmptyRegion, "convolution result is empty");
  return Density(1, std::move(terms), DecayClass::compact());
}

BenchReport bench_compare(int n, int workers) {
  if (!power_of_two(n) || n < (1 << 10) || n > (1 << 20))
    fail(ErrorCode::InvalidArgument, "bench grid size must be a power of two in [2^10, 2^20]");
  auto s = Density::on_region(1.0, {std::make_shared<BumpKernel>(1.5, 0.5)},
                              Region::from_interval(Interval::closed(1, 2)), DecayClass::compact());
  auto t = Density::on_region(1.0, {std::make_shared<BumpKernel>(2.25, 0.75)},
                              Region::from_interval(Interval::closed(Rational(3, 2), 3)), DecayClass::compact());
  using clock = std::chrono::steady_clock;
  BenchReport rep;
  rep.n = n;
  ConvolveOptions opts;
  opts.richardson = false;
  opts.workers = workers;
  auto t0 = clock::now();
  auto fast = convolve_fast(s, t, n, opts);
  rep.fast_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  const auto& q = fast.quadrants.at(0);
  rep.grid_points = fast.used[0];
  long stride = std::max<long>(1, rep.grid_points / 4096);
  double peak = 0.0;
  for (long m = 0; m < rep.grid_points; ++m) peak = std::max(peak, std::fabs(q.values[static_cast<std::size_t>(m)]));
  t0 = clock::now();
  for (long m = 0; m < rep.grid_points; m += stride) {
    double o = convolve_oracle(s, t, fast.point(q, static_cast<std::size_t>(m)));
    ++rep.oracle_points;
    double f = q.values[static_cast<std::size_t>(m)];
    if (std::fabs(o) > 1e-3 * peak) rep.max_rel_error = std::max(rep.max_rel_error, std::fabs(f - o) / std::fabs(o));
  }
  double sampled = std::chrono::duration<double>(clock::now() - t0).count();
  rep.oracle_seconds = sampled * static_cast<double>(rep.grid_points) / static_cast<double>(rep.oracle_points);
  rep.speedup = rep.fast_seconds > 0.0 ? rep.oracle_seconds / rep.fast_seconds : 0.0;
  return rep;
}

}  // namespace hadamard
