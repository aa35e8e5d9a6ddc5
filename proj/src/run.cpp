#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "hadamard/classifier.hpp"
#include "hadamard/cli.hpp"
#include "hadamard/hadamard_action.hpp"
#include "hadamard/mellin.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace hadamard {

namespace {

using nlohmann::json;

[[noreturn]] void missing(const std::string& command, const std::string& field) {
  fail(ErrorCode::ConfigError, "config." + field + ": required by " + command);
}

json to_json(const MultiIndex& m) {
  json a = json::array();
  for (int j = 0; j < m.dim; ++j) a.push_back(m[j]);
  return a;
}

json to_json(const Point& p) {
  json a = json::array();
  for (int j = 0; j < p.dim; ++j) a.push_back(p[j]);
  return a;
}

// sum w (-1)^|k| d^k [sigma(x) x^(-alpha-1)] (a) for point masses.
std::optional<double> closed_form_eigenvalue(const DistributionRep& t, const MultiIndex& alpha) {
  if (t.kind() != DistributionKind::PointMassCombo) return std::nullopt;
  double total = 0.0;
  for (const auto& pm : t.point_mass_combo().terms) {
    double v = pm.weight;
    for (int j = 0; j < t.dim(); ++j) {
      double a = to_double(pm.anchor[static_cast<std::size_t>(j)]);
      if (a == 0.0) return std::nullopt;
      int k = pm.order[j], p = alpha[j] + 1;
      double sign = (a > 0 ? 1.0 : -1.0) * (k % 2 ? -1.0 : 1.0);
      v *= sign * falling_factorial(-static_cast<double>(p), k) * std::pow(a, -p - k);
    }
    total += v;
  }
  return total;
}

std::vector<TestFunction> test_functions(const ExperimentConfig& c) {
  std::vector<TestFunction> out = c.test_functions;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> cen(-2.5, 2.5), rad(0.3, 0.9);
  for (int i = 0; i < c.random_test_functions; ++i) {
    Point a(c.dimension), r(c.dimension);
    for (int j = 0; j < c.dimension; ++j) {
      a[j] = cen(rng);
      r[j] = rad(rng);
    }
    out.push_back(TestFunction::bump(a, r));
  }
  return out;
}

PairOptions pair_options(const ExperimentConfig& c) {
  PairOptions po;
  po.quad.abs_tol = c.tol_quad;
  return po;
}

struct EigenRows {
  json rows = json::array();
  bool all_pass = true;
  std::string error;
};

EigenRows eigen_rows(const ExperimentConfig& c, const std::vector<TestFunction>& phis, int workers) {
  EigenRows out;
  const auto& t = *c.distribution;
  auto po = pair_options(c);
  std::vector<std::unique_ptr<EigenContext>> ctx;
  try {
    for (const auto& phi : phis) ctx.push_back(std::make_unique<EigenContext>(t, phi, po));
  } catch (const Error& e) {
    out.error = e.what();
    out.all_pass = false;
    return out;
  }
  auto alphas = multi_index_grid(c.dimension, c.alpha_max);
  std::vector<json> rows(alphas.size());
  std::vector<std::string> errors(alphas.size());
  detail::parallel_for(alphas.size(), workers, [&](std::size_t i) {
    const auto& alpha = alphas[i];
    json row;
    row["alpha"] = to_json(alpha);
    try {
      double worst = -1.0;
      bool pass = true;
      for (const auto& cx : ctx) {
        EigenReport rep = cx->report(alpha, c.tol_resid);
        row["eigenvalue"] = rep.eigenvalue;
        double ratio = std::fabs(rep.residual) / (rep.tolerance * std::max(1.0, rep.scale));
        if (ratio > worst) {
          worst = ratio;
          row["residual"] = rep.residual;
          row["scale"] = rep.scale;
        }
        pass = pass && rep.pass;
      }
      row["residual_ratio"] = worst;
      row["pass"] = pass;
      if (auto cf = closed_form_eigenvalue(t, alpha)) {
        row["closed_form"] = *cf;
      } else {
        row["closed_form"] = nullptr;
      }
    } catch (const Error& e) {
      errors[i] = e.what();
      row["pass"] = false;
      row["error"] = e.what();
    }
    rows[i] = std::move(row);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]["pass"].get<bool>()) out.all_pass = false;
    if (out.error.empty() && !errors[i].empty()) out.error = errors[i];
    out.rows.push_back(std::move(rows[i]));
  }
  return out;
}

json support_json(const SupportCheck& s) {
  json j;
  j["outcome"] = to_string(s.outcome);
  j["exact"] = s.exact;
  j["levels_checked"] = s.levels_checked;
  j["detail"] = s.detail;
  if (s.witness) j["witness_compact"] = s.witness->str();
  if (s.escaping) j["escaping_point"] = format_point(*s.escaping);
  if (!s.image.empty()) j["image"] = s.image.str();
  return j;
}

int verdict_exit(VerdictKind k) {
  switch (k) {
    case VerdictKind::Admissible: return kExitPass;
    case VerdictKind::NotAdmissible: return kExitFail;
    default: return kExitUnknown;
  }
}

json verdict_json(const Verdict& v) {
  json j;
  j["verdict"] = to_string(v.kind);
  j["rule"] = to_string(v.rule);
  j["domain_case"] = to_string(v.domain.kind);
  j["omega_tilde"] = v.domain.patterns.str();
  j["reason"] = v.reason;
  if (!v.witness.empty()) j["witness"] = v.witness;
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  if (v.support) j["support"] = support_json(*v.support);
  return j;
}

struct Outcome {
  int exit_code = kExitPass;
  std::string rule;
  std::string summary;
  json result = json::object();
  std::string csv;  // empty: flattened result
};

Outcome cmd_eigentable(const ExperimentConfig& c, const RunOptions& o) {
  if (!c.distribution) missing("eigentable", "distribution");
  auto phis = test_functions(c);
  if (phis.empty()) missing("eigentable", "test_functions");
  Outcome out;
  out.rule = "eigen-residual";
  auto er = eigen_rows(c, phis, o.workers);
  out.result["distribution"] = c.distribution->describe();
  out.result["test_functions"] = phis.size();
  out.result["tolerance"] = c.tol_resid;
  out.result["rows"] = er.rows;
  out.result["all_pass"] = er.all_pass;
  if (!er.error.empty()) out.result["error"] = er.error;
  std::size_t passed = 0;
  for (const auto& r : er.rows) passed += r["pass"].get<bool>() ? 1 : 0;
  std::ostringstream s;
  s << passed << "/" << er.rows.size() << " residual checks pass";
  out.summary = s.str();
  if (!er.error.empty())
    out.exit_code = er.rows.empty() ? kExitUnknown : kExitFail;
  else
    out.exit_code = er.all_pass ? kExitPass : kExitFail;
  if (!er.error.empty() && er.error.find("SupportTouchesHyperplane") != std::string::npos) out.exit_code = kExitUnknown;

  std::ostringstream csv;
  csv << "alpha,eigenvalue,closed_form,residual,scale,residual_ratio,pass\n";
  csv.precision(17);
  for (const auto& r : er.rows) {
    std::string a;
    for (std::size_t j = 0; j < r["alpha"].size(); ++j) a += (j ? ";" : "") + std::to_string(r["alpha"][j].get<int>());
    csv << a << ",";
    auto num = [&](const char* key) {
      if (r.contains(key) && r[key].is_number()) csv << r[key].get<double>();
    };
    num("eigenvalue");
    csv << ",";
    num("closed_form");
    csv << ",";
    num("residual");
    csv << ",";
    num("scale");
    csv << ",";
    num("residual_ratio");
    csv << "," << (r["pass"].get<bool>() ? "true" : "false") << "\n";
  }
  out.csv = csv.str();
  return out;
}

Outcome cmd_verify(const ExperimentConfig& c, const RunOptions& o) {
  if (!c.distribution) missing("verify", "distribution");
  auto phis = test_functions(c);
  if (phis.empty()) missing("verify", "test_functions");
  Outcome out;
  out.rule = "eigen-residual";
  const auto& t = *c.distribution;
  const int d = c.dimension;
  bool failed = false, unknown = false;

  auto er = eigen_rows(c, phis, o.workers);
  std::size_t passed = 0;
  for (const auto& r : er.rows) passed += r["pass"].get<bool>() ? 1 : 0;
  json eig;
  eig["checks"] = er.rows.size();
  eig["passed"] = passed;
  if (!er.error.empty()) eig["error"] = er.error;
  std::vector<json> fails;
  for (const auto& r : er.rows)
    if (!r["pass"].get<bool>() && fails.size() < 5) fails.push_back(r);
  eig["first_failures"] = fails;
  out.result["eigen_residual"] = eig;
  if (!er.all_pass) failed = true;
  if (!er.error.empty() && er.error.find("SupportTouchesHyperplane") != std::string::npos) {
    failed = false;
    unknown = true;
  }

  // dilation equivariance M(phi(eta .))(y) = (M phi)(eta y)
  json dil = json::array();
  const double etas[] = {2.0, -0.5};
  const double ys[] = {1.1, -0.9, 0.45};
  auto po = pair_options(c);
  bool dil_pass = true;
  try {
    for (std::size_t f = 0; f < phis.size(); ++f) {
      auto psi = transpose_apply(t, phis[f], po);
      for (double e : etas)
        for (double yv : ys) {
          Point eta(d, e), y(d, yv);
          for (int j = 1; j < d; ++j) y[j] = yv * (j % 2 ? 1.3 : -1.0);
          double gap = dilation_commutes(t, phis[f], eta, y, po);
          double tol = c.tol_resid * std::max(1.0, std::fabs(psi.value(eta * y)));
          bool pass = gap <= tol;
          dil_pass = dil_pass && pass;
          dil.push_back({{"test_function", f}, {"eta", to_json(eta)}, {"y", to_json(y)}, {"gap", gap}, {"pass", pass}});
        }
    }
    out.result["dilation"] = dil;
  } catch (const Error& e) {
    out.result["dilation"] = {{"error", e.what()}};
    dil_pass = false;
  }
  if (!dil_pass) failed = true;

  std::string verdict_text;
  if (c.domain) {
    Verdict v = admissible(t, *c.domain);
    out.result["classification"] = verdict_json(v);
    int ve = verdict_exit(v.kind);
    if (ve == kExitFail) failed = true;
    if (ve == kExitUnknown) unknown = true;
    verdict_text = std::string(", ") + to_string(v.kind) + " (" + to_string(v.rule) + ")";
    if (ve != kExitPass) out.rule = to_string(v.rule);
  }
  out.exit_code = failed ? kExitFail : unknown ? kExitUnknown : kExitPass;
  std::ostringstream s;
  s << passed << "/" << er.rows.size() << " residual checks, dilation " << (dil_pass ? "pass" : "fail") << verdict_text;
  out.summary = s.str();
  return out;
}

Outcome cmd_classify(const ExperimentConfig& c, const RunOptions&) {
  if (!c.distribution) missing("classify", "distribution");
  if (!c.domain) missing("classify", "domain");
  Verdict v = admissible(*c.distribution, *c.domain);
  Outcome out;
  out.rule = to_string(v.rule);
  out.result = verdict_json(v);
  out.result["distribution"] = c.distribution->describe();
  out.result["domain"] = c.domain->str();
  out.exit_code = verdict_exit(v.kind);
  out.summary = std::string(to_string(v.kind)) + ": " + v.reason;
  if (!v.witness.empty()) out.summary += " (witness " + v.witness + ")";
  return out;
}

Outcome cmd_omega_tilde(const ExperimentConfig& c, const RunOptions&) {
  if (!c.domain) missing("omega-tilde", "domain");
  Outcome out;
  out.rule = "dilation-closure";
  auto s = omega_tilde(*c.domain);
  out.result["domain"] = c.domain->str();
  out.result["omega_tilde"] = s.str();
  out.result["patterns"] = s.pattern_strings();
  out.result["full_space"] = s.is_full_space();
  out.result["punctured_space"] = s.is_punctured_space();
  out.result["nonzero_orthants"] = s.is_nonzero_orthant_union();
  out.summary = s.str();
  return out;
}

Outcome cmd_vstar(const ExperimentConfig& c, const RunOptions&) {
  std::optional<Region> m = c.vstar_m ? c.vstar_m : c.domain;
  if (!m) missing("vstar", "vstar.m");
  Region n = c.vstar_n ? *c.vstar_n : *m;
  Outcome out;
  out.rule = "dilation-set";
  auto v = v_star(*m, n);
  out.result["m"] = m->str();
  out.result["n"] = n.str();
  out.result["v_star"] = v.set.str();
  out.result["exact"] = v.exact;
  if (!v.exact) out.result["unknown_band"] = v.unknown_band.str();
  bool identity = v.exact && same_set(v.set, Region::point(Point::ones(c.dimension)));
  out.result["identity_only"] = identity;
  out.exit_code = v.exact ? kExitPass : kExitUnknown;
  out.summary = "V_* = " + v.set.str() + (v.exact ? "" : " (approximate)");
  return out;
}

Outcome cmd_support_check(const ExperimentConfig& c, const RunOptions&) {
  if (!c.distribution) missing("support-check", "distribution");
  if (!c.domain) missing("support-check", "domain");
  Outcome out;
  out.rule = "support-condition";
  out.result["distribution"] = c.distribution->describe();
  out.result["domain"] = c.domain->str();
  out.result["support"] = support_of(*c.distribution).str();
  try {
    auto s = support_condition(*c.distribution, *c.domain, c.support_levels);
    out.result["check"] = support_json(s);
    out.exit_code = s.outcome == SupportOutcome::Holds ? kExitPass
                    : s.outcome == SupportOutcome::Fails ? kExitFail
                                                          : kExitUnknown;
    out.summary = std::string(to_string(s.outcome)) + (s.escaping ? " at " + format_point(*s.escaping) : "");
  } catch (const Error& e) {
    out.result["check"] = {{"outcome", "Unknown"}, {"error", e.what()}};
    out.exit_code = kExitUnknown;
    out.summary = std::string("Unknown: ") + e.what();
  }
  return out;
}

Outcome cmd_convolve(const ExperimentConfig& c, const RunOptions& o) {
  if (!c.conv_s) missing("convolve", "convolve.s");
  Outcome out;
  out.rule = "mellin-grid";
  const auto& s = *c.conv_s;
  const auto& t = *c.conv_t;
  ConvolveOptions co;
  co.richardson = c.richardson;
  co.coarse_tolerance = c.coarse_tolerance;
  co.workers = o.workers;
  try {
    auto r = convolve_fast(s, t, c.grid_n, co);
    json grid;
    grid["n"] = r.grid.n;
    json step = json::array(), origin = json::array(), used = json::array();
    for (int j = 0; j < r.dim(); ++j) {
      step.push_back(r.grid.step[static_cast<std::size_t>(j)]);
      origin.push_back(r.grid.origin(j));
      used.push_back(r.used[static_cast<std::size_t>(j)]);
    }
    grid["step"] = step;
    grid["log_origin"] = origin;
    grid["used"] = used;
    out.result["grid"] = grid;
    out.result["discrepancy"] = r.discrepancy;
    out.result["total_mass"] = r.total_mass;
    double mass = density_mass(s) * density_mass(t);
    out.result["mass_product"] = mass;
    json quads = json::array();
    for (const auto& q : r.quadrants) {
      json sg = json::array();
      for (int j = 0; j < r.dim(); ++j) sg.push_back(q.signs[static_cast<std::size_t>(j)]);
      quads.push_back(sg);
    }
    out.result["quadrants"] = quads;
    json pts = json::array();
    for (const auto& z : c.points)
      pts.push_back({{"z", to_json(z)}, {"value", r.value_at(z)}, {"oracle", convolve_oracle(s, t, z)}});
    out.result["points"] = pts;

    std::ostringstream csv;
    csv.precision(17);
    for (int j = 0; j < r.dim(); ++j) csv << "z" << j + 1 << ",";
    csv << "value\n";
    long count = 0;
    for (const auto& q : r.quadrants)
      for (std::size_t i = 0; i < q.values.size(); ++i) {
        std::size_t idx = i;
        bool inside = true;
        for (int j = r.dim() - 1; j >= 0; --j) {
          if (static_cast<int>(idx % static_cast<std::size_t>(r.grid.n)) >= r.used[static_cast<std::size_t>(j)]) inside = false;
          idx /= static_cast<std::size_t>(r.grid.n);
        }
        if (!inside) continue;
        Point z = r.point(q, i);
        for (int j = 0; j < r.dim(); ++j) csv << z[j] << ",";
        csv << q.values[i] << "\n";
        ++count;
      }
    out.result["samples"] = count;
    out.csv = csv.str();
    std::ostringstream sm;
    sm << count << " samples, mass " << r.total_mass << " (product of masses " << mass << ")";
    out.summary = sm.str();
  } catch (const Error& e) {
    out.result["error"] = e.what();
    out.exit_code = e.code() == ErrorCode::GridTooCoarse ? kExitUnknown : kExitFail;
    out.summary = e.what();
  }
  return out;
}

Outcome cmd_bench(const ExperimentConfig& c, const RunOptions& o) {
  Outcome out;
  out.rule = "mellin-bench";
  int n = c.grid_n;
  try {
    auto b = bench_compare(n, o.workers);
    out.result = {{"n", b.n},
                  {"fast_seconds", b.fast_seconds},
                  {"oracle_seconds", b.oracle_seconds},
                  {"oracle_points", b.oracle_points},
                  {"grid_points", b.grid_points},
                  {"speedup", b.speedup},
                  {"max_rel_error", b.max_rel_error}};
    std::ostringstream s;
    s << "speedup " << b.speedup << "x at n=" << n;
    out.summary = s.str();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, "config.grid_n: " + e.detail());
  }
  return out;
}

using Handler = Outcome (*)(const ExperimentConfig&, const RunOptions&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h = {
      {"eigentable", cmd_eigentable},   {"verify", cmd_verify},           {"classify", cmd_classify},
      {"omega-tilde", cmd_omega_tilde}, {"vstar", cmd_vstar},             {"support-check", cmd_support_check},
      {"convolve", cmd_convolve},       {"bench", cmd_bench},
  };
  return h;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

const char* status_word(int code) {
  switch (code) {
    case kExitPass: return "pass";
    case kExitFail: return "fail";
    default: return "unknown";
  }
}

}  // namespace

const std::string& RunReport::render(ReportFormat f) const {
  switch (f) {
    case ReportFormat::Json: return json;
    case ReportFormat::Csv: return csv;
    default: return text;
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& h : handlers()) v.push_back(h.first);
    return v;
  }();
  return names;
}

RunReport run(std::string_view command, const ExperimentConfig& config, const RunOptions& opts) {
  Handler h = nullptr;
  for (const auto& [name, fn] : handlers())
    if (name == command) h = fn;
  if (!h) fail(ErrorCode::ConfigError, "unknown command '" + std::string(command) + "'");
  Outcome o = h(config, opts);

  RunReport rep;
  rep.command = std::string(command);
  rep.exit_code = o.exit_code;
  json doc;
  doc["report_version"] = 1;
  doc["command"] = rep.command;
  doc["config"] = json::parse(config.canonical);
  doc["rule"] = o.rule;
  doc["status"] = status_word(o.exit_code);
  doc["exit_code"] = o.exit_code;
  doc["summary"] = o.summary;
  doc["result"] = o.result;
  rep.json = doc.dump(2) + "\n";

  std::vector<std::pair<std::string, std::string>> fields;
  flatten(o.result, "", fields);
  std::ostringstream text;
  text << rep.command << " [" << o.rule << "] " << status_word(o.exit_code) << ": " << o.summary << "\n";
  for (const auto& [k, v] : fields) text << "  " << k << " = " << v << "\n";
  rep.text = text.str();

  if (!o.csv.empty()) {
    rep.csv = o.csv;
  } else {
    std::ostringstream csv;
    csv << "field,value\n";
    csv << "status," << status_word(o.exit_code) << "\n";
    csv << "rule," << csv_field(o.rule) << "\n";
    for (const auto& [k, v] : fields) csv << csv_field(k) << "," << csv_field(v) << "\n";
    rep.csv = csv.str();
  }
  return rep;
}

}  // namespace hadamard
