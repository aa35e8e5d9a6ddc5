// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hadamard/classifier.hpp"
#include "hadamard/cli.hpp"
#include "hadamard/euler.hpp"
#include "hadamard/hadamard_action.hpp"
#include "hadamard/mellin.hpp"
#include "support.hpp"

using namespace hadamard;
using namespace hadamard::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Every numeric result a criterion computes is appended here; criterion 10
// recomputes 1-9 and compares the two transcripts byte for byte.
struct Digest {
  std::string text;
  void add(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    text += buf;
  }
  void add(const std::string& s) { text += s + ";"; }
};

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Region parse_box(std::vector<const char*> sides) {
  Box b;
  for (auto* s : sides) b.sides.push_back(Interval::parse(s));
  return Region::from_box(b);
}

// Tensor Gauss-Legendre nodes over a box, independent of the adaptive integrator.
struct TensorRule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
  Point at(std::size_t i) const {
    Point x(static_cast<int>(nodes[i].size()));
    for (std::size_t j = 0; j < nodes[i].size(); ++j) x[static_cast<int>(j)] = nodes[i][j];
    return x;
  }
};

TensorRule tensor_gauss(const std::vector<std::pair<double, double>>& box, int panels, int order) {
  const auto& rule = gauss_legendre(order);
  TensorRule out{{{}}, {1.0}};
  for (auto [a, b] : box) {
    TensorRule next;
    double h = (b - a) / panels;
    for (std::size_t k = 0; k < out.nodes.size(); ++k)
      for (int p = 0; p < panels; ++p) {
        double m = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          auto x = out.nodes[k];
          x.push_back(m + 0.5 * h * rule.nodes[i]);
          next.nodes.push_back(x);
          next.weights.push_back(out.weights[k] * 0.5 * h * rule.weights[i]);
        }
      }
    out = std::move(next);
  }
  return out;
}

Outcome eigen_battery(Digest& dg) {
  Outcome o;
  long checked = 0;
  double worst = 0.0;
  std::string worst_at;
  for (int d = 1; d <= 2; ++d) {
    auto bumps = random_bumps(d, 2024 + static_cast<std::uint64_t>(d), 3);
    for (const auto& [name, t] : battery(d)) {
      for (std::size_t b = 0; b < bumps.size(); ++b) {
        EigenContext ctx(t, bumps[b]);
        for (const auto& a : multi_index_grid(d, 8)) {
          auto r = ctx.report(a, 1e-7);
          dg.add(r.residual);
          dg.add(r.scale);
          double ratio = std::fabs(r.residual) / r.scale;
          ++checked;
          if (ratio > worst) {
            worst = ratio;
            worst_at = name + " alpha=" + a.str() + " bump " + std::to_string(b);
          }
          if (!(std::fabs(r.residual) <= 1e-7 * r.scale)) o.pass = false;
        }
      }
    }
  }
  o.detail = std::to_string(checked) + " residuals, worst residual/scale " + fmt(worst) + " (" + worst_at + ")";
  return o;
}

Outcome closed_forms(Digest& dg) {
  Outcome o;
  double worst = 0.0;
  int fits = 0;
  auto fit = [&](const DistributionRep& t, const TestFunction& phi, const std::vector<std::pair<double, double>>& psi_box,
                 const std::vector<std::pair<double, double>>& phi_box, int max_each, int panels,
                 const std::function<double(const MultiIndex&)>& closed) {
    auto psi = transpose_apply(t, phi);
    int d = phi.dim();
    auto qy = tensor_gauss(psi_box, panels, 20), qx = tensor_gauss(phi_box, panels, 20);
    std::vector<double> fy, fx;
    for (std::size_t i = 0; i < qy.nodes.size(); ++i) fy.push_back(psi.value(qy.at(i)));
    for (std::size_t i = 0; i < qx.nodes.size(); ++i) fx.push_back(phi.value(qx.at(i)));
    auto moment = [&](const TensorRule& q, const std::vector<double>& f, const MultiIndex& a) {
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        double m = q.weights[i] * f[i];
        for (int j = 0; j < d; ++j) m *= std::pow(q.nodes[i][static_cast<std::size_t>(j)], a[j]);
        s += m;
      }
      return s;
    };
    for (const auto& a : multi_index_grid(d, max_each)) {
      double lhs = moment(qy, fy, a), rhs = moment(qx, fx, a);
      double m = lhs / rhs, want = closed(a);
      double err = std::fabs(m - want) / std::fabs(want);
      dg.add(m);
      worst = std::max(worst, err);
      ++fits;
      if (!(err <= 1e-9)) o.pass = false;
    }
  };
  const double anchors[] = {-2.0, -0.5, 0.5, 2.0};
  auto ph1 = TestFunction::bump(Point{1.5}, Point{0.9});
  auto image = [](double c, double r, double a) {
    double u = (c - r) / a, v = (c + r) / a;
    return std::make_pair(std::min(u, v), std::max(u, v));
  };
  for (double a : anchors)
    fit(DistributionRep::delta(Point{a}), ph1, {image(1.5, 0.9, a)}, {{0.6, 2.4}}, 8, 64,
        [&](const MultiIndex& al) { return (a < 0 ? -1.0 : 1.0) * std::pow(a, -al[0] - 1); });
  fit(DistributionRep::delta(Point{1.0}, MultiIndex{1}), ph1, {{0.6, 2.4}}, {{0.6, 2.4}}, 8, 64,
      [](const MultiIndex& al) { return al[0] + 1.0; });

  auto ph2 = TestFunction::bump(Point{1.5, 1.2}, Point{0.9, 0.7});
  for (double a0 : anchors)
    for (double a1 : anchors)
      fit(DistributionRep::delta(Point{a0, a1}), ph2, {image(1.5, 0.9, a0), image(1.2, 0.7, a1)},
          {{0.6, 2.4}, {0.5, 1.9}}, 8, 12, [&](const MultiIndex& al) {
            double s = (a0 < 0) != (a1 < 0) ? -1.0 : 1.0;
            return s * std::pow(a0, -al[0] - 1) * std::pow(a1, -al[1] - 1);
          });
  o.detail = std::to_string(fits) + " eigenvalue fits, worst relative error " + fmt(worst);
  return o;
}

Outcome tail_example(Digest& dg) {
  Outcome o;
  auto t = exp_tail();
  auto phi = TestFunction::bump(Point{0.5}, Point{0.4});
  auto psi = transpose_apply(t, phi);
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    double y = 0.15 * i;
    double lo = std::max(y, 0.1), hi = 0.9;
    double want =
        lo < hi ? fixed_gauss([&](double x) { return phi.value(Point{x}) * std::exp(-x / y); }, lo, hi, 512) / y : 0.0;
    double got = psi.value(Point{y});
    dg.add(got);
    worst = std::max(worst, std::fabs(got - want));
  }
  if (!(worst <= 1e-7)) o.pass = false;
  Region unit = box_region(1, "(0,1)");
  auto sc = support_condition(t, unit);
  bool fails = sc.outcome == SupportOutcome::Fails && sc.witness.has_value();
  if (!fails) o.pass = false;
  auto cfg = parse_config(R"j({"dimension": 1, "distribution": {"kind": "density", "decay": "rapid",
    "terms": [{"region": ["[1,inf)"], "kernels": [{"type": "exp", "rate": 1}]}]}, "domain": ["(0,1)"]})j");
  int code = run("classify", cfg).exit_code;
  if (code != kExitFail) o.pass = false;
  dg.add(std::to_string(code));
  o.detail = "max |M phi - oracle| " + fmt(worst) + " over 20 y; support condition " + to_string(sc.outcome) +
             (sc.witness ? " with witness" : " without witness") + "; classify exit " + std::to_string(code);
  return o;
}

Outcome linf_ball(Digest& dg) {
  Outcome o;
  std::vector<Region> reps;
  reps.push_back(parse_box({"(-1,1)", "(-1,1)"}));
  reps.push_back(unite(parse_box({"(-1,1)", "(-1,1/2)"}), parse_box({"(-1,1)", "(-1/2,1)"})));
  Region grid(2);
  const char* cuts[] = {"(-1,-1/4)", "(-1/2,1/2)", "(1/4,1)"};
  for (auto* a : cuts)
    for (auto* b : cuts) grid = unite(grid, parse_box({a, b}));
  reps.push_back(grid);

  std::vector<DistributionRep> corpus;
  for (const auto& [name, t] : battery(2))
    if (hyperplane_clearance(t) >= 1.0) corpus.push_back(t);
  corpus.push_back(DistributionRep::delta(Point{-1.0, 1.5}));
  corpus.push_back(DistributionRep::delta(Point{-2.0, 3.0}, MultiIndex{1, 0}));
  int holds = 0, total = 0;
  bool near_fails = true;
  for (const auto& omega : reps) {
    for (const auto& t : corpus) {
      ++total;
      auto c = support_condition(t, omega);
      dg.add(to_string(c.outcome));
      if (c.outcome == SupportOutcome::Holds) ++holds;
      else o.pass = false;
    }
    auto c = support_condition(DistributionRep::delta(Point{0.9, 2.0}), omega);
    dg.add(to_string(c.outcome));
    if (c.outcome != SupportOutcome::Fails) near_fails = false;
  }
  if (!near_fails) o.pass = false;
  o.detail = std::to_string(holds) + "/" + std::to_string(total) + " clearance>=1 cases hold over " +
             std::to_string(reps.size()) + " box representations; anchor 0.9 " + (near_fails ? "fails" : "does not fail");
  return o;
}

Outcome duality(Digest& dg) {
  Outcome o;
  std::mt19937_64 rng(5);
  int probes = 0, bad = 0, unequal = 0;
  for (int i = 0; i < 100; ++i) {
    Region m = random_union_1d(rng), n = random_union_1d(rng);
    auto rep = duality_check(m, n);
    if (!rep.equal) ++unequal;
    dg.add(rep.lhs.str());
    Region mc = complement(m), nc = complement(n);
    // every ratio of endpoints, with the cells between them
    std::vector<Rational> ratios;
    for (const auto& a : endpoints_1d(m))
      for (const auto& b : endpoints_1d(n))
        if (a != 0 && b != 0) {
          ratios.push_back(b / a);
          ratios.push_back(a / b);
        }
    for (const auto& eta : probe_grid(ratios)) {
      if (eta == 0) continue;
      ++probes;
      bool lhs = brute_dilation_subset(mc, nc, eta);
      bool rhs = brute_dilation_subset(n, m, Rational(1) / eta);
      if (lhs != rhs || rep.lhs.contains(RPoint{eta}) != lhs || rep.rhs.contains(RPoint{eta}) != rhs) ++bad;
    }
  }
  if (unequal || bad) o.pass = false;
  o.detail = "100 random unions: " + std::to_string(unequal) + " unequal, " + std::to_string(bad) + "/" +
             std::to_string(probes) + " brute-force probes disagree";
  return o;
}

Outcome strata(Digest& dg) {
  Outcome o;
  auto full = omega_tilde(parse_box({"(-1,1)", "(-1,1)"}));
  auto nz = omega_tilde(parse_box({"(1,2)", "(1,2)"}));
  auto punct = omega_tilde(complement(Region::point(Point{0.0, 0.0})));
  auto strips = omega_tilde(Region(2, {Box({Interval::parse("(1,2)"), Interval::parse("(-1,1)")}),
                                       Box({Interval::parse("(-1,1)"), Interval::parse("(1,2)")})}));
  for (const auto* s : {&full, &nz, &punct, &strips}) dg.add(s->str());
  bool cases = full.is_full_space() && nz.is_nonzero_orthant_union() && punct.is_punctured_space() &&
               strips.is_punctured_space();
  if (!cases) o.pass = false;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> num(1, 9), sgn(0, 1);
  int broken = 0;
  for (int i = 0; i < 50; ++i) {
    int d = 1 + i % 3;
    Region om = random_open_region(rng, d);
    RPoint a;
    for (int j = 0; j < d; ++j) a.push_back(Rational(num(rng), num(rng)) * (sgn(rng) ? 1 : -1));
    auto base = omega_tilde(om);
    dg.add(base.str());
    if (omega_tilde(dilate(om, a)).patterns != base.patterns) ++broken;
  }
  if (broken) o.pass = false;
  o.detail = std::string("strata cases ") + (cases ? "exact" : "wrong") + " (" + full.str() + " | " + nz.str() +
             " | " + punct.str() + "); " + std::to_string(broken) + "/50 dilations change the strata";
  return o;
}

Outcome euler_domains(Digest& dg) {
  Outcome o;
  bool a = euler_only(box_region(1, "(1,2)"));
  bool b = euler_only(parse_box({"(1,2)", "(3,4)"}));
  bool c = euler_only(box_region(1, "(0,1)"));
  dg.add(std::to_string(a) + std::to_string(b) + std::to_string(c));
  if (!a || !b || c) o.pass = false;
  auto omega = box_region(1, "(1,2)");
  int rejected = 0, others = 0, wrong = 0;
  std::vector<NamedDistribution> corpus = battery(1);
  corpus.push_back({"exp-tail", exp_tail()});
  corpus.push_back({"delta(3/2)", DistributionRep::delta(Point{1.5})});
  for (const auto& [name, t] : corpus) {
    auto v = admissible(t, omega);
    dg.add(to_string(v.kind));
    bool unit = same_set(support_of(t), Region::point(Point{1.0}));
    if (unit) {
      if (v.kind != VerdictKind::Admissible) ++wrong;
      continue;
    }
    ++others;
    if (v.kind == VerdictKind::NotAdmissible) ++rejected;
    else ++wrong;
  }
  if (wrong) o.pass = false;
  o.detail = std::string("euler_only (1,2)=") + (a ? "true" : "false") + " (1,2)x(3,4)=" + (b ? "true" : "false") +
             " (0,1)=" + (c ? "true" : "false") + "; rejected " + std::to_string(rejected) + "/" +
             std::to_string(others) + " corpus T with support other than {1}";
  return o;
}

Outcome euler_bridge(Digest& dg) {
  Outcome o;
  double worst = 0.0;
  auto check = [&](const EulerPolynomial& p) {
    auto t = euler_to_hadamard(p);
    for (const auto& a : multi_index_grid(p.dim(), 8)) {
      double m = eigenvalue(t, a), want = p.evaluate(a);
      dg.add(m);
      worst = std::max(worst, std::fabs(m - want));
    }
  };
  check(EulerPolynomial::constant(1));
  check(EulerPolynomial::theta(1));
  check(EulerPolynomial(1, {{MultiIndex{2}, 1.0}}));
  check(EulerPolynomial(2, {{MultiIndex{1, 1}, 1.0}, {MultiIndex{0, 0}, 3.0}}));
  if (!(worst <= 1e-9)) o.pass = false;
  o.detail = "P in {1, theta, theta^2, theta1 theta2 + 3}: max |m_alpha - P(alpha)| " + fmt(worst);
  return o;
}

Density bump_density(double c, double r) {
  Interval side = Interval::make(to_rational(c - r), true, to_rational(c + r), true);
  return Density::on_region(1.0, {std::make_shared<BumpKernel>(c, r)}, Region::from_interval(side),
                            DecayClass::compact());
}

Outcome mellin(Digest& dg, bool timed) {
  Outcome o;
  auto one = Density::indicator(box_region(1, "[1,2]"));
  auto r = convolve_fast(one, one, 4096);
  double v = r.value_at(Point{2.0});
  double ln2_err = std::fabs(v - std::log(2.0)) / std::log(2.0);
  dg.add(v);
  if (!(ln2_err <= 1e-6)) o.pass = false;

  auto s = bump_density(1.3, 0.4), t = bump_density(2.1, 0.6);
  auto rb = convolve_fast(s, t, 4096);
  double peak = 0.0, gap = 0.0;
  for (double x : rb.quadrants[0].values) peak = std::max(peak, std::fabs(x));
  const auto& q = rb.quadrants[0];
  for (std::size_t i = 0; i < static_cast<std::size_t>(rb.used[0]); i += 41) {
    Point z = rb.point(q, i);
    gap = std::max(gap, std::fabs(q.values[i] - convolve_oracle(s, t, z)));
  }
  gap /= peak;
  dg.add(gap);
  if (!(gap <= 1e-6)) o.pass = false;

  double ms = density_mass(s), mt = density_mass(t);
  double mass_err = std::fabs(rb.total_mass - ms * mt) / std::fabs(ms * mt);
  dg.add(rb.total_mass);
  if (!(mass_err <= 1e-8)) o.pass = false;

  o.detail = "ln2 rel err " + fmt(ln2_err) + "; oracle gap " + fmt(gap) + "; mass rel err " + fmt(mass_err);
  if (timed) {
    auto b = bench_compare(1 << 12);
    o.detail += "; speedup at n=4096 " + fmt(b.speedup, "%.1f") + "x" +
                (b.speedup >= 5.0 ? "" : " (below 5x; machine-dependent, not enforced)");
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every command on every shipped config, by report JSON.
std::string command_transcript(int workers) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(HADAMARD_CONFIG_DIR))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string out;
  std::vector<std::string> texts;
  for (const auto& f : files) texts.push_back(slurp(f));
  texts.push_back(R"j({"dimension": 2, "distribution": {"kind": "euler", "terms": [{"beta": [1, 0],
    "density": {"terms": [{"region": [["[1,2]", "[1,2]"]]}]}}]}, "random_test_functions": 3, "seed": 7, "alpha_max": 8})j");
  for (const auto& text : texts) {
    for (const auto& cmd : command_names()) {
      if (cmd == "bench") continue;
      try {
        out += run(cmd, parse_config(text), RunOptions{workers}).json;
      } catch (const Error& e) {
        out += cmd + ": " + e.what();
      }
      out += "\n";
    }
  }
  return out;
}

Outcome determinism(const std::string& first, const std::function<std::string()>& rerun) {
  Outcome o;
  bool same_run = rerun() == first;
  std::string c1 = command_transcript(1), c1b = command_transcript(1), c4 = command_transcript(4);
  bool same_cmd = c1 == c1b;
  bool same_workers = c1 == c4;

  auto s = bump_density(1.3, 0.4), t = bump_density(2.1, 0.6);
  ConvolveOptions four;
  four.workers = 4;
  auto a = convolve_fast(s, t, 4096), b = convolve_fast(s, t, 4096, four);
  bool same_fft = a.quadrants[0].values.size() == b.quadrants[0].values.size() &&
                  std::memcmp(a.quadrants[0].values.data(), b.quadrants[0].values.data(),
                              a.quadrants[0].values.size() * sizeof(double)) == 0;
  if (!(same_run && same_cmd && same_workers && same_fft)) o.pass = false;
  auto yn = [](bool v) { return v ? "identical" : "DIFFERENT"; };
  o.detail = std::string("suite transcript rerun ") + yn(same_run) + "; command reports rerun " + yn(same_cmd) +
             ", workers 1 vs 4 " + yn(same_workers) + "; FFT samples workers 1 vs 4 " + yn(same_fft) + " (" +
             std::to_string(first.size() + c1.size()) + " bytes compared)";
  return o;
}

}  // namespace

int main() {
  using Suite = std::function<Outcome(Digest&)>;
  std::vector<Suite> suites{eigen_battery, closed_forms, tail_example, linf_ball, duality, strata, euler_domains,
                            euler_bridge, [](Digest& d) { return mellin(d, true); }};
  const char* names[] = {"eigen-residual battery",  "closed-form eigenvalues", "exponential tail example",
                         "l-infinity ball boxes",   "dilation-set duality",    "dilation strata",
                         "euler-only domains",      "euler bridge",            "mellin engine",
                         "determinism"};
  Digest digest;
  bool all = true;
  auto report = [&](int i, const Outcome& o, double secs) {
    all = all && o.pass;
    std::printf("criterion %d %s: %s - %s [%.1fs]\n", i + 1, names[i], o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("threw: ") + e.what()};
    }
  };
  for (std::size_t i = 0; i < suites.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    auto o = guarded([&] { return suites[i](digest); });
    report(static_cast<int>(i), o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  auto t0 = std::chrono::steady_clock::now();
  auto o = guarded([&] {
    return determinism(digest.text, [&] {
      Digest again;
      for (std::size_t i = 0; i + 1 < suites.size(); ++i) suites[i](again);
      mellin(again, false);
      return again.text;
    });
  });
  report(9, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
