#include "doctest.h"
#include "hadamard/cli.hpp"
#include "hadamard/hadamard_action.hpp"

#include <string>

using namespace hadamard;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) return e.detail();
    return std::string("wrong code: ") + e.what();
  }
  return "accepted";
}

const char* kDelta = R"j({"dimension": 1, "distribution": {"kind": "point_masses", "terms": [{"anchor": [2]}]},
  "test_functions": [{"type": "bump", "center": 1.5, "radius": 1}], "alpha_max": 4})j";

}  // namespace

TEST_CASE("config literals") {
  auto c = parse_config(R"j({"dimension": 1, "distribution": {"kind": "point_masses", "terms": [{"anchor": [0.1]}, {"anchor": ["2/3"], "order": [1], "weight": -2}]}})j");
  REQUIRE(c.distribution);
  const auto& pm = c.distribution->point_mass_combo().terms;
  REQUIRE(pm.size() == 2);
  CHECK(pm[0].anchor[0] == Rational(1, 10));
  CHECK(pm[1].anchor[0] == Rational(2, 3));
  CHECK(pm[1].order[0] == 1);
  CHECK(pm[1].weight == -2.0);

  auto e = parse_config(R"j({"dimension": 2, "distribution": {"kind": "euler_polynomial", "coefficients": [{"index": [1, 1], "value": 1}, {"index": [0, 0], "value": 3}]}})j");
  CHECK(eigenvalue(*e.distribution, MultiIndex{2, 3}) == doctest::Approx(9.0).epsilon(1e-12));

  auto th = parse_config(R"j({"dimension": 1, "distribution": {"kind": "euler", "terms": [{"beta": [1], "density": {"terms": [{"region": ["[1,2]"]}]}}]}})j");
  CHECK(th.distribution->kind() == DistributionKind::EulerForm);

  auto r = parse_config(R"j({"dimension": 2, "domain": [["(-1,1)", "(-1,1)"], ["(0,3)", "(-1/2,1/2)"]]})j");
  REQUIRE(r.domain);
  CHECK(r.domain->boxes().size() == 2);
  CHECK(r.domain->contains(Point{2.5, 0.25}));

  auto tf = parse_config(R"j({"dimension": 2, "test_functions": [{"type": "sum", "terms": [{"coefficient": 2, "factors": [[{"type": "bump", "center": 1, "radius": 1}, {"type": "polynomial", "coeffs": [0, 1]}], [{"type": "plateau", "center": 0, "inner": 0.5, "outer": 1}]]}]}]})j");
  REQUIRE(tf.test_functions.size() == 1);
  CHECK(tf.test_functions[0].value(Point{1.0, 0.2}) == doctest::Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("config diagnostics name the field") {
  CHECK(config_error(R"j({"dimension": 1, "test_functions": [{"type": "bump", "center": 1, "radius": 1, "extra": 0}]})j") ==
        "config.test_functions[0].extra: unknown field");
  CHECK(config_error(R"j({"dimension": 2, "distribution": {"kind": "euler", "terms": [{"beta": [1], "density": {"terms": []}}]}})j") ==
        "config.distribution.terms[0].beta: expected 2 entries, got 1");
  CHECK(config_error(R"j({"dimension": 1, "distribution": {"kind": "density", "terms": [{"region": ["[2,1]"]}]}})j")
            .rfind("config.distribution.terms[0].region[0]", 0) == 0);
  CHECK(config_error(R"j({"dimension": 1, "convolve": {"s": {"terms": [{"region": ["[1,2]"]}]}}})j") ==
        "config.convolve.t: required field missing");
  CHECK(config_error(R"j({"dimension": 1, "seed": -4})j") == "config.seed: expected a non-negative integer");
  CHECK(config_error(R"j({"dimension": 1, "distribution": {"kind": "euler_polynomial", "coefficients": [{"index": [1], "value": 1}, {"index": [1], "value": 2}]}})j") ==
        "config.distribution.coefficients[1].index: duplicate multi-index (1)");
  CHECK(config_error("{\"dimension\": 1,\n \"domain\": [\"(0,1)\"\n") .find("line 3") != std::string::npos);
}

TEST_CASE("overrides land in the canonical config") {
  ConfigOverrides o;
  o.alpha_max = 2;
  o.tol_resid = 1e-6;
  o.seed = 11u;
  auto c = parse_config(kDelta, o);
  CHECK(c.alpha_max == 2);
  CHECK(c.tol_resid == 1e-6);
  CHECK(c.seed == 11u);
  CHECK(c.canonical.find("\"alpha_max\":2") != std::string::npos);
  auto again = parse_config(c.canonical);
  CHECK(again.canonical == c.canonical);
}

TEST_CASE("eigentable exit codes and closed forms") {
  auto rep = run("eigentable", parse_config(kDelta));
  CHECK(rep.exit_code == kExitPass);
  CHECK(rep.csv.find("4,0.03125,0.03125") != std::string::npos);

  auto tight = parse_config(kDelta, ConfigOverrides{std::nullopt, std::nullopt, 1e-30, std::nullopt, std::nullopt});
  CHECK(run("eigentable", tight).exit_code == kExitFail);

  auto zero = parse_config(R"j({"dimension": 1, "distribution": {"kind": "point_masses", "terms": [{"anchor": [0]}]},
    "test_functions": [{"type": "bump", "center": 1, "radius": 1}]})j");
  CHECK(run("eigentable", zero).exit_code == kExitUnknown);
  CHECK_THROWS_AS(run("eigentable", parse_config(R"j({"dimension": 1})j")), Error);
}

TEST_CASE("classification commands") {
  auto tail = parse_config(R"j({"dimension": 1, "distribution": {"kind": "density", "decay": "rapid",
    "terms": [{"region": ["[1,inf)"], "kernels": [{"type": "exp", "rate": 1}]}]}, "domain": ["(0,1)"]})j");
  auto cl = run("classify", tail);
  CHECK(cl.exit_code == kExitFail);
  CHECK(cl.json.find("\"rule\": \"necessity\"") != std::string::npos);
  CHECK(cl.json.find("escaping point") != std::string::npos);
  CHECK(run("support-check", tail).exit_code == kExitFail);

  auto ball = parse_config(R"j({"dimension": 2, "distribution": {"kind": "point_masses", "terms": [{"anchor": [2, -1]}]},
    "domain": [["(-1,1)", "(-1,1)"]]})j");
  CHECK(run("classify", ball).exit_code == kExitPass);
  CHECK(run("support-check", ball).exit_code == kExitPass);

  auto strips = parse_config(R"j({"dimension": 2, "distribution": {"kind": "point_masses", "terms": [{"anchor": [1, 1]}]},
    "domain": [["(1,2)", "(-1,1)"], ["(-1,1)", "(1,2)"]]})j");
  auto ot = run("omega-tilde", strips);
  CHECK(ot.text.find("R^d\\{0}") != std::string::npos);
  CHECK(run("classify", strips).exit_code == kExitUnknown);

  auto cube = parse_config(R"j({"dimension": 2, "domain": [["(1,2)", "(3,4)"]]})j");
  auto vs = run("vstar", cube);
  CHECK(vs.exit_code == kExitPass);
  CHECK(vs.json.find("\"identity_only\": true") != std::string::npos);
}

TEST_CASE("convolve command") {
  auto c = parse_config(R"j({"dimension": 1, "convolve": {"s": {"terms": [{"region": ["[1,2]"]}]},
    "t": {"terms": [{"region": ["[-2,-1]"]}]}, "points": [-2]}, "grid_n": 4096})j");
  auto rep = run("convolve", c);
  CHECK(rep.exit_code == kExitPass);
  CHECK(rep.csv.rfind("z1,value\n", 0) == 0);
  CHECK(rep.json.find("\"quadrants\"") != std::string::npos);

  auto coarse = parse_config(R"j({"dimension": 1, "convolve": {"s": {"terms": [{"region": ["[1,2]"], "kernels": [{"type": "bump", "center": 1.5, "radius": 0.5}]}]},
    "t": {"terms": [{"region": ["[1.9,2.1]"], "kernels": [{"type": "bump", "center": 2, "radius": 0.1}]}]}}, "grid_n": 64})j");
  CHECK(run("convolve", coarse).exit_code == kExitUnknown);
}

TEST_CASE("reports are reproducible and accepted as configs") {
  auto c = parse_config(R"j({"dimension": 2, "distribution": {"kind": "point_masses", "terms": [{"anchor": [2, 0.5]}]},
    "domain": [["(-1,1)", "(-1,1)"]], "random_test_functions": 2, "seed": 3, "alpha_max": 2})j");
  auto a = run("verify", c, RunOptions{1});
  auto b = run("verify", c, RunOptions{4});
  CHECK(a.json == b.json);
  auto from_report = parse_config(a.json);
  CHECK(from_report.canonical == c.canonical);
  CHECK(run("verify", from_report).json == a.json);
  CHECK(a.render(ReportFormat::Text) == a.text);
  CHECK_THROWS_AS(run("plot", c), Error);
}
