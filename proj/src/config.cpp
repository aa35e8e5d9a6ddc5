#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "hadamard/cli.hpp"
#include "hadamard/euler.hpp"
#include "json.hpp"

namespace hadamard {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  fail(ErrorCode::ConfigError, path + ": " + why);
}

// Library errors raised while building a value are re-tagged with the field.
template <class F>
auto at_field(const std::string& path, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError && e.detail().rfind("config", 0) == 0) throw;
    bad(path, e.detail());
  }
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const char* type_name(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "a boolean";
    case json::value_t::string: return "a string";
    case json::value_t::array: return "an array";
    case json::value_t::object: return "an object";
    default: return "a number";
  }
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                const std::set<std::string>& required = {}) {
  if (!j.is_object()) bad(path, std::string("expected an object, got ") + type_name(j));
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad(path + "." + it.key(), "unknown field");
  for (const auto& r : required)
    if (!j.contains(r)) bad(path + "." + r, "required field missing");
}

const json& array_of(const json& j, const std::string& path, std::size_t min_size = 0) {
  if (!j.is_array()) bad(path, std::string("expected an array, got ") + type_name(j));
  if (j.size() < min_size) bad(path, "needs at least " + std::to_string(min_size) + " entries");
  return j;
}

double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, std::string("expected a number, got ") + type_name(j));
  double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "must be finite");
  return v;
}

double get_positive(const json& j, const std::string& path) {
  double v = get_double(j, path);
  if (!(v > 0.0)) bad(path, "must be positive");
  return v;
}

long long get_int(const json& j, const std::string& path, long long lo, long long hi) {
  if (!j.is_number_integer()) bad(path, std::string("expected an integer, got ") + type_name(j));
  auto v = j.get<long long>();
  if (v < lo || v > hi) bad(path, "must be in " + std::to_string(lo) + ".." + std::to_string(hi));
  return v;
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, std::string("expected a boolean, got ") + type_name(j));
  return j.get<bool>();
}

const std::string& get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, std::string("expected a string, got ") + type_name(j));
  return j.get_ref<const std::string&>();
}

// Numbers keep their shortest decimal form, so 0.1 is 1/10 exactly.
Rational get_rational(const json& j, const std::string& path) {
  if (j.is_number()) {
    get_double(j, path);
    return at_field(path, [&] { return parse_rational(j.dump()); });
  }
  if (j.is_string()) return at_field(path, [&] { return parse_rational(j.get<std::string>()); });
  bad(path, std::string("expected a number or a rational string, got ") + type_name(j));
}

Point get_point(const json& j, const std::string& path, int d) {
  array_of(j, path);
  if (static_cast<int>(j.size()) != d) bad(path, "expected " + std::to_string(d) + " coordinates, got " + std::to_string(j.size()));
  Point p(d);
  for (int i = 0; i < d; ++i) p[i] = get_double(j[static_cast<std::size_t>(i)], index_path(path, static_cast<std::size_t>(i)));
  return p;
}

// A per-coordinate list, or a bare scalar in one dimension.
Point get_coords(const json& j, const std::string& path, int d) {
  if (d == 1 && j.is_number()) return Point{get_double(j, path)};
  return get_point(j, path, d);
}

MultiIndex get_multi_index(const json& j, const std::string& path, int d, int max_each) {
  array_of(j, path);
  if (static_cast<int>(j.size()) != d) bad(path, "expected " + std::to_string(d) + " entries, got " + std::to_string(j.size()));
  MultiIndex m(d);
  for (int i = 0; i < d; ++i) m[i] = static_cast<int>(get_int(j[static_cast<std::size_t>(i)], index_path(path, static_cast<std::size_t>(i)), 0, max_each));
  return m;
}

Box get_box(const json& j, const std::string& path, int d) {
  if (j.is_string()) {
    if (d != 1) bad(path, "a bare interval string is only allowed in one dimension");
    return Box({at_field(path, [&] { return Interval::parse(j.get<std::string>()); })});
  }
  array_of(j, path);
  if (static_cast<int>(j.size()) != d)
    bad(path, "expected " + std::to_string(d) + " interval strings, got " + std::to_string(j.size()));
  std::vector<Interval> sides;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = index_path(path, i);
    sides.push_back(at_field(p, [&] { return Interval::parse(get_string(j[i], p)); }));
  }
  return Box(sides);
}

Region get_region(const json& j, const std::string& path, int d) {
  array_of(j, path, 1);
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Box b = get_box(j[i], index_path(path, i), d);
    if (b.empty()) bad(index_path(path, i), "box " + b.str() + " is empty");
    boxes.push_back(std::move(b));
  }
  return Region(d, std::move(boxes));
}

Region get_open_region(const json& j, const std::string& path, int d) {
  Region r = get_region(j, path, d);
  if (!r.is_open()) bad(path, "domain " + r.str() + " must be open");
  return r;
}

KernelPtr get_kernel(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, std::string("expected an object, got ") + type_name(j));
  if (!j.contains("type")) bad(path + ".type", "required field missing");
  const std::string& type = get_string(j["type"], path + ".type");
  if (type == "constant") {
    check_keys(j, path, {"type", "value"});
    return std::make_shared<ConstantKernel>(j.contains("value") ? get_double(j["value"], path + ".value") : 1.0);
  }
  if (type == "exp" || type == "gauss") {
    check_keys(j, path, {"type", "rate"}, {"rate"});
    double rate = get_positive(j["rate"], path + ".rate");
    if (type == "exp") return std::make_shared<ExpKernel>(rate);
    return std::make_shared<GaussKernel>(rate);
  }
  if (type == "power") {
    check_keys(j, path, {"type", "p"}, {"p"});
    double p = get_positive(j["p"], path + ".p");
    return at_field(path, [&]() -> KernelPtr { return std::make_shared<PowerDecayKernel>(p); });
  }
  if (type == "bump") {
    check_keys(j, path, {"type", "center", "radius"}, {"center", "radius"});
    double c = get_double(j["center"], path + ".center");
    double r = get_positive(j["radius"], path + ".radius");
    return std::make_shared<BumpKernel>(c, r);
  }
  if (type == "polynomial") {
    check_keys(j, path, {"type", "coeffs"}, {"coeffs"});
    array_of(j["coeffs"], path + ".coeffs", 1);
    std::vector<double> c;
    for (std::size_t i = 0; i < j["coeffs"].size(); ++i) c.push_back(get_double(j["coeffs"][i], index_path(path + ".coeffs", i)));
    return std::make_shared<PolynomialKernel>(c);
  }
  bad(path + ".type", "unknown kernel type '" + type + "' (constant, exp, gauss, power, bump, polynomial)");
}

DecayClass get_decay(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "compact") return DecayClass::compact();
    if (s == "rapid") return DecayClass::rapid();
    bad(path, "unknown decay tag '" + s + "' (compact, rapid, {\"polynomial\": p})");
  }
  check_keys(j, path, {"polynomial"}, {"polynomial"});
  double p = get_positive(j["polynomial"], path + ".polynomial");
  return at_field(path, [&] { return DecayClass::polynomial(p); });
}

// {"terms": [{"coefficient", "region", "kernels"}], "decay"}; "kind" is
// allowed so a full distribution literal can be used where a density is meant.
Density get_density(const json& j, const std::string& path, int d) {
  check_keys(j, path, {"kind", "terms", "decay"}, {"terms"});
  if (j.contains("kind") && get_string(j["kind"], path + ".kind") != "density")
    bad(path + ".kind", "expected \"density\"");
  DecayClass decay = j.contains("decay") ? get_decay(j["decay"], path + ".decay") : DecayClass::compact();
  const json& terms = array_of(j["terms"], path + ".terms", 1);
  std::vector<DensityTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string tp = index_path(path + ".terms", i);
    const json& t = terms[i];
    check_keys(t, tp, {"coefficient", "region", "kernels"}, {"region"});
    double coef = t.contains("coefficient") ? get_double(t["coefficient"], tp + ".coefficient") : 1.0;
    std::vector<KernelPtr> kernels;
    if (t.contains("kernels")) {
      const json& ks = array_of(t["kernels"], tp + ".kernels");
      if (static_cast<int>(ks.size()) != d)
        bad(tp + ".kernels", "expected " + std::to_string(d) + " kernels, got " + std::to_string(ks.size()));
      for (std::size_t k = 0; k < ks.size(); ++k) kernels.push_back(get_kernel(ks[k], index_path(tp + ".kernels", k)));
    } else {
      for (int k = 0; k < d; ++k) kernels.push_back(std::make_shared<ConstantKernel>(1.0));
    }
    Region r = get_region(t["region"], tp + ".region", d);
    Region pieces = disjoint_boxes(r);
    for (const auto& b : pieces.boxes()) out.push_back({coef, b, kernels});
  }
  return at_field(path, [&] { return Density(d, std::move(out), decay); });
}

DistributionRep get_distribution(const json& j, const std::string& path, int d) {
  if (!j.is_object()) bad(path, std::string("expected an object, got ") + type_name(j));
  if (!j.contains("kind")) bad(path + ".kind", "required field missing");
  const std::string& kind = get_string(j["kind"], path + ".kind");
  if (kind == "point_masses") {
    check_keys(j, path, {"kind", "terms"}, {"terms"});
    const json& terms = array_of(j["terms"], path + ".terms", 1);
    std::vector<PointMass> pms;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string tp = index_path(path + ".terms", i);
      const json& t = terms[i];
      check_keys(t, tp, {"anchor", "order", "weight"}, {"anchor"});
      const json& a = array_of(t["anchor"], tp + ".anchor");
      if (static_cast<int>(a.size()) != d)
        bad(tp + ".anchor", "expected " + std::to_string(d) + " coordinates, got " + std::to_string(a.size()));
      PointMass pm;
      for (std::size_t k = 0; k < a.size(); ++k) pm.anchor.push_back(get_rational(a[k], index_path(tp + ".anchor", k)));
      pm.order = t.contains("order") ? get_multi_index(t["order"], tp + ".order", d, kMaxJetOrder) : MultiIndex(d);
      pm.weight = t.contains("weight") ? get_double(t["weight"], tp + ".weight") : 1.0;
      pms.push_back(std::move(pm));
    }
    return at_field(path, [&] { return DistributionRep::point_masses(d, std::move(pms)); });
  }
  if (kind == "density") return DistributionRep::density(get_density(j, path, d));
  if (kind == "euler") {
    check_keys(j, path, {"kind", "terms"}, {"terms"});
    const json& terms = array_of(j["terms"], path + ".terms", 1);
    std::vector<EulerTerm> ets;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string tp = index_path(path + ".terms", i);
      check_keys(terms[i], tp, {"beta", "density"}, {"beta", "density"});
      ets.push_back({get_multi_index(terms[i]["beta"], tp + ".beta", d, 12),
                     get_density(terms[i]["density"], tp + ".density", d)});
    }
    return at_field(path, [&] { return DistributionRep::euler(d, std::move(ets)); });
  }
  if (kind == "euler_polynomial") {
    check_keys(j, path, {"kind", "coefficients"}, {"coefficients"});
    const json& cs = array_of(j["coefficients"], path + ".coefficients", 1);
    std::map<MultiIndex, double> coeffs;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string cp = index_path(path + ".coefficients", i);
      check_keys(cs[i], cp, {"index", "value"}, {"index", "value"});
      MultiIndex m = get_multi_index(cs[i]["index"], cp + ".index", d, 12);
      if (coeffs.count(m)) bad(cp + ".index", "duplicate multi-index " + m.str());
      coeffs[m] = get_double(cs[i]["value"], cp + ".value");
    }
    return at_field(path, [&] { return euler_to_hadamard(EulerPolynomial(d, coeffs)); });
  }
  bad(path + ".kind", "unknown distribution kind '" + kind + "' (point_masses, density, euler, euler_polynomial)");
}

FactorSpec get_factor(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, std::string("expected an object, got ") + type_name(j));
  if (!j.contains("type")) bad(path + ".type", "required field missing");
  const std::string& type = get_string(j["type"], path + ".type");
  FactorSpec f;
  if (type == "bump") {
    check_keys(j, path, {"type", "center", "radius"}, {"center", "radius"});
    f.kind = FactorSpec::Kind::Bump;
    f.center = get_double(j["center"], path + ".center");
    f.radius = get_positive(j["radius"], path + ".radius");
  } else if (type == "plateau") {
    check_keys(j, path, {"type", "center", "inner", "outer"}, {"center", "inner", "outer"});
    f.kind = FactorSpec::Kind::Plateau;
    f.center = get_double(j["center"], path + ".center");
    f.inner = get_double(j["inner"], path + ".inner");
    f.radius = get_positive(j["outer"], path + ".outer");
    if (!(f.inner >= 0.0 && f.inner < f.radius)) bad(path + ".inner", "must satisfy 0 <= inner < outer");
  } else if (type == "polynomial") {
    check_keys(j, path, {"type", "coeffs"}, {"coeffs"});
    f.kind = FactorSpec::Kind::Polynomial;
    const json& c = array_of(j["coeffs"], path + ".coeffs", 1);
    for (std::size_t i = 0; i < c.size(); ++i) f.coeffs.push_back(get_double(c[i], index_path(path + ".coeffs", i)));
  } else {
    bad(path + ".type", "unknown factor type '" + type + "' (bump, plateau, polynomial)");
  }
  return f;
}

// {"type": "bump", "center", "radius"}, {"type": "plateau", "center",
// "inner", "outer"} or {"type": "sum", "terms": [{"coefficient", "factors"}]}.
TestFunction get_test_function(const json& j, const std::string& path, int d) {
  if (!j.is_object()) bad(path, std::string("expected an object, got ") + type_name(j));
  if (!j.contains("type")) bad(path + ".type", "required field missing");
  const std::string& type = get_string(j["type"], path + ".type");
  int max_order = 24;
  auto order_of = [&] {
    if (j.contains("max_order")) max_order = static_cast<int>(get_int(j["max_order"], path + ".max_order", 0, kMaxJetOrder));
  };
  std::vector<TestTermSpec> terms;
  if (type == "bump") {
    check_keys(j, path, {"type", "center", "radius", "max_order"}, {"center", "radius"});
    order_of();
    Point c = get_coords(j["center"], path + ".center", d), r = get_coords(j["radius"], path + ".radius", d);
    TestTermSpec t;
    for (int k = 0; k < d; ++k) {
      if (!(r[k] > 0.0)) bad(path + ".radius", "entries must be positive");
      t.factors.push_back({FactorSpec{FactorSpec::Kind::Bump, {}, c[k], r[k], 0.0}});
    }
    terms.push_back(std::move(t));
  } else if (type == "plateau") {
    check_keys(j, path, {"type", "center", "inner", "outer", "max_order"}, {"center", "inner", "outer"});
    order_of();
    Point c = get_coords(j["center"], path + ".center", d), in = get_coords(j["inner"], path + ".inner", d),
          out = get_coords(j["outer"], path + ".outer", d);
    TestTermSpec t;
    for (int k = 0; k < d; ++k) {
      if (!(in[k] >= 0.0 && in[k] < out[k])) bad(path + ".inner", "entries must satisfy 0 <= inner < outer");
      t.factors.push_back({FactorSpec{FactorSpec::Kind::Plateau, {}, c[k], out[k], in[k]}});
    }
    terms.push_back(std::move(t));
  } else if (type == "sum") {
    check_keys(j, path, {"type", "terms", "max_order"}, {"terms"});
    order_of();
    const json& ts = array_of(j["terms"], path + ".terms", 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::string tp = index_path(path + ".terms", i);
      check_keys(ts[i], tp, {"coefficient", "factors"}, {"factors"});
      TestTermSpec t;
      t.coefficient = ts[i].contains("coefficient") ? get_double(ts[i]["coefficient"], tp + ".coefficient") : 1.0;
      const json& fs = array_of(ts[i]["factors"], tp + ".factors");
      if (static_cast<int>(fs.size()) != d)
        bad(tp + ".factors", "expected " + std::to_string(d) + " factor lists, got " + std::to_string(fs.size()));
      for (std::size_t k = 0; k < fs.size(); ++k) {
        std::string fp = index_path(tp + ".factors", k);
        const json& list = array_of(fs[k], fp, 1);
        std::vector<FactorSpec> specs;
        for (std::size_t m = 0; m < list.size(); ++m) specs.push_back(get_factor(list[m], index_path(fp, m)));
        t.factors.push_back(std::move(specs));
      }
      terms.push_back(std::move(t));
    }
  } else {
    bad(path + ".type", "unknown test function type '" + type + "' (bump, plateau, sum)");
  }
  return at_field(path, [&] { return TestFunction(d, std::move(terms), max_order); });
}

void apply_overrides(json& doc, const ConfigOverrides& o) {
  if (o.alpha_max) doc["alpha_max"] = *o.alpha_max;
  if (o.tol_quad || o.tol_resid) {
    if (!doc.contains("tolerances")) doc["tolerances"] = json::object();
    json& t = doc["tolerances"];
    if (!t.is_object()) bad("config.tolerances", std::string("expected an object, got ") + type_name(t));
    if (o.tol_quad) t["quadrature_abs"] = *o.tol_quad;
    if (o.tol_resid) t["residual_rel"] = *o.tol_resid;
  }
  if (o.grid_n) doc["grid_n"] = *o.grid_n;
  if (o.seed) doc["seed"] = *o.seed;
}

bool power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    auto pos = msg.find("parse error");
    bad("config", "invalid JSON: " + (pos == std::string::npos ? msg : msg.substr(pos)));
  }
  if (doc.is_object() && doc.contains("report_version")) {
    if (!doc.contains("config")) bad("config", "report has no embedded config");
    json inner = doc["config"];
    doc = std::move(inner);
  }
  apply_overrides(doc, overrides);
  const std::string root = "config";
  check_keys(doc, root,
             {"dimension", "distribution", "domain", "test_functions", "random_test_functions", "seed", "alpha_max",
              "tolerances", "support_levels", "vstar", "convolve", "grid_n"},
             {"dimension"});

  ExperimentConfig c;
  c.dimension = static_cast<int>(get_int(doc["dimension"], root + ".dimension", 1, kMaxDim));
  const int d = c.dimension;
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      bad(root + ".seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("alpha_max")) c.alpha_max = static_cast<int>(get_int(doc["alpha_max"], root + ".alpha_max", 0, 24));
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    check_keys(t, root + ".tolerances", {"quadrature_abs", "residual_rel"});
    if (t.contains("quadrature_abs")) c.tol_quad = get_positive(t["quadrature_abs"], root + ".tolerances.quadrature_abs");
    if (t.contains("residual_rel")) c.tol_resid = get_positive(t["residual_rel"], root + ".tolerances.residual_rel");
  }
  if (doc.contains("support_levels"))
    c.support_levels = static_cast<int>(get_int(doc["support_levels"], root + ".support_levels", 1, 60));
  if (doc.contains("grid_n")) {
    auto n = get_int(doc["grid_n"], root + ".grid_n", 16, 1 << 20);
    if (!power_of_two(n)) bad(root + ".grid_n", "must be a power of two");
    c.grid_n = static_cast<int>(n);
  }
  if (doc.contains("distribution")) c.distribution = get_distribution(doc["distribution"], root + ".distribution", d);
  if (doc.contains("domain")) c.domain = get_open_region(doc["domain"], root + ".domain", d);
  if (doc.contains("test_functions")) {
    const json& tf = array_of(doc["test_functions"], root + ".test_functions");
    for (std::size_t i = 0; i < tf.size(); ++i)
      c.test_functions.push_back(get_test_function(tf[i], index_path(root + ".test_functions", i), d));
  }
  if (doc.contains("random_test_functions"))
    c.random_test_functions = static_cast<int>(get_int(doc["random_test_functions"], root + ".random_test_functions", 0, 64));
  if (doc.contains("vstar")) {
    const json& v = doc["vstar"];
    check_keys(v, root + ".vstar", {"m", "n"}, {"m"});
    c.vstar_m = get_region(v["m"], root + ".vstar.m", d);
    if (v.contains("n")) c.vstar_n = get_region(v["n"], root + ".vstar.n", d);
  }
  if (doc.contains("convolve")) {
    const json& v = doc["convolve"];
    std::string p = root + ".convolve";
    check_keys(v, p, {"s", "t", "points", "richardson", "coarse_tolerance"}, {"s", "t"});
    c.conv_s = get_density(v["s"], p + ".s", d);
    c.conv_t = get_density(v["t"], p + ".t", d);
    if (v.contains("points")) {
      const json& pts = array_of(v["points"], p + ".points");
      for (std::size_t i = 0; i < pts.size(); ++i) c.points.push_back(get_coords(pts[i], index_path(p + ".points", i), d));
    }
    if (v.contains("richardson")) c.richardson = get_bool(v["richardson"], p + ".richardson");
    if (v.contains("coarse_tolerance")) c.coarse_tolerance = get_positive(v["coarse_tolerance"], p + ".coarse_tolerance");
  }
  c.canonical = doc.dump();
  return c;
}

}  // namespace hadamard
