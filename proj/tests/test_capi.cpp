#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "hadamard/hadamard.h"

#include <cmath>
#include <cstring>
#include <string>

namespace {

struct Dist {
  hdm_distribution* p = nullptr;
  ~Dist() { hdm_distribution_free(p); }
};
struct Reg {
  hdm_region* p = nullptr;
  ~Reg() { hdm_region_free(p); }
};
struct Fn {
  hdm_test_function* p = nullptr;
  ~Fn() { hdm_test_function_free(p); }
};
struct Rep {
  hdm_report* p = nullptr;
  ~Rep() { hdm_report_free(p); }
};

const char* kDelta2 = R"j({"kind": "point_masses", "terms": [{"anchor": [2]}]})j";

}  // namespace

TEST_CASE("handles and literals") {
  Dist t;
  REQUIRE(hdm_distribution_from_json(1, kDelta2, &t.p) == HDM_OK);
  CHECK(hdm_distribution_dim(t.p) == 1);
  CHECK(std::string(hdm_distribution_describe(t.p)).find("delta") != std::string::npos);

  Reg r;
  REQUIRE(hdm_region_from_json(2, R"j([["(0,1]", "[2,inf)"]])j", &r.p) == HDM_OK);
  CHECK(hdm_region_dim(r.p) == 2);
  CHECK(std::string(hdm_region_str(r.p)) == "(0,1]x[2,inf)");

  Fn f;
  REQUIRE(hdm_test_function_from_json(1, R"j({"type": "plateau", "center": 1, "inner": 0.2, "outer": 0.5})j", &f.p) ==
          HDM_OK);
  double x = 1.1, v = 0.0;
  REQUIRE(hdm_test_function_value(f.p, &x, &v) == HDM_OK);
  CHECK(v == 1.0);
}

TEST_CASE("errors carry status and message") {
  Dist t;
  CHECK(hdm_distribution_from_json(1, R"j({"kind": "point_masses", "terms": [{"anchor": [1, 2]}]})j", &t.p) ==
        HDM_CONFIG_ERROR);
  CHECK(t.p == nullptr);
  CHECK(std::string(hdm_last_error()).find("anchor") != std::string::npos);

  Reg r;
  CHECK(hdm_region_from_json(1, "[\"(0,1\"]", &r.p) == HDM_CONFIG_ERROR);
  CHECK(hdm_region_from_json(1, nullptr, &r.p) == HDM_INVALID_ARGUMENT);

  Dist zero;
  double a = 0.0;
  REQUIRE(hdm_distribution_delta(1, &a, nullptr, 1.0, &zero.p) == HDM_OK);
  int alpha = 0;
  double m = 0.0;
  CHECK(hdm_eigenvalue(zero.p, &alpha, &m) == HDM_SUPPORT_TOUCHES_HYPERPLANE);
  CHECK(std::strlen(hdm_last_error()) > 0);
  CHECK(std::string(hdm_status_name(HDM_GRID_TOO_COARSE)) == "grid too coarse");
}

TEST_CASE("eigenvalues and residuals") {
  Dist t;
  REQUIRE(hdm_distribution_from_json(1, kDelta2, &t.p) == HDM_OK);
  Fn f;
  double c = 1.5, rad = 1.0;
  REQUIRE(hdm_test_function_bump(1, &c, &rad, &f.p) == HDM_OK);
  for (int alpha = 0; alpha <= 8; ++alpha) {
    double m = 0.0;
    REQUIRE(hdm_eigenvalue(t.p, &alpha, &m) == HDM_OK);
    CHECK(m == doctest::Approx(std::pow(2.0, -alpha - 1)).epsilon(1e-12));
    double res = 1.0, scale = 0.0;
    int pass = 0;
    REQUIRE(hdm_verify_monomial(t.p, &alpha, f.p, 1e-7, &res, &scale, &pass) == HDM_OK);
    CHECK(pass == 1);
  }
  double y = 0.6, mv = 0.0, direct = 0.0, xy = 1.2;
  REQUIRE(hdm_transpose_value(t.p, f.p, &y, &mv) == HDM_OK);
  REQUIRE(hdm_test_function_value(f.p, &xy, &direct) == HDM_OK);
  CHECK(mv == doctest::Approx(direct).epsilon(1e-15));
  double paired = 0.0, two = 2.0;
  REQUIRE(hdm_pair(t.p, f.p, &paired) == HDM_OK);
  REQUIRE(hdm_test_function_value(f.p, &two, &direct) == HDM_OK);
  CHECK(paired == doctest::Approx(direct));

  double anchor = 1.0;
  int order = 1;
  Dist dp;
  REQUIRE(hdm_distribution_delta(1, &anchor, &order, 1.0, &dp.p) == HDM_OK);
  int alpha = 3;
  double m = 0.0;
  REQUIRE(hdm_eigenvalue(dp.p, &alpha, &m) == HDM_OK);
  CHECK(m == doctest::Approx(4.0));
}

TEST_CASE("classification") {
  Dist t;
  REQUIRE(hdm_distribution_from_json(
              1, R"j({"kind": "density", "decay": "rapid", "terms": [{"region": ["[1,inf)"], "kernels": [{"type": "exp", "rate": 1}]}]})j",
              &t.p) == HDM_OK);
  Reg unit;
  REQUIRE(hdm_region_from_json(1, R"j(["(0,1)"])j", &unit.p) == HDM_OK);
  hdm_support_outcome so = HDM_SUPPORT_HOLDS;
  REQUIRE(hdm_support_condition(t.p, unit.p, 10, &so) == HDM_OK);
  CHECK(so == HDM_SUPPORT_FAILS);
  hdm_verdict v = HDM_ADMISSIBLE;
  REQUIRE(hdm_classify(t.p, unit.p, &v) == HDM_OK);
  CHECK(v == HDM_NOT_ADMISSIBLE);

  Reg a, b;
  REQUIRE(hdm_region_from_json(1, R"j(["(1,2)"])j", &a.p) == HDM_OK);
  int only = 0;
  REQUIRE(hdm_euler_only(a.p, &only) == HDM_OK);
  CHECK(only == 1);
  REQUIRE(hdm_euler_only(unit.p, &only) == HDM_OK);
  CHECK(only == 0);
}

TEST_CASE("convolution value") {
  Dist s;
  REQUIRE(hdm_distribution_from_json(1, R"j({"kind": "density", "terms": [{"region": ["[1,2]"]}]})j", &s.p) == HDM_OK);
  double z = 2.0, v = 0.0;
  REQUIRE(hdm_convolve_value(s.p, s.p, 4096, &z, &v) == HDM_OK);
  CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  Dist d;
  REQUIRE(hdm_distribution_from_json(1, kDelta2, &d.p) == HDM_OK);
  CHECK(hdm_convolve_value(s.p, d.p, 4096, &z, &v) == HDM_INVALID_ARGUMENT);
}

TEST_CASE("run and reports") {
  const char* cfg = R"j({"dimension": 1, "distribution": {"kind": "point_masses", "terms": [{"anchor": [2]}]},
                        "test_functions": [{"type": "bump", "center": 1.5, "radius": 1}], "alpha_max": 2})j";
  hdm_run_options o;
  hdm_run_options_init(&o);
  Rep r;
  REQUIRE(hdm_run("eigentable", cfg, &o, &r.p) == HDM_OK);
  CHECK(hdm_report_exit_code(r.p) == 0);
  std::string csv = hdm_report_render(r.p, HDM_FORMAT_CSV);
  CHECK(csv.find("2,0.125,0.125") != std::string::npos);
  std::string js = hdm_report_render(r.p, HDM_FORMAT_JSON);
  CHECK(js.find("\"report_version\": 1") != std::string::npos);

  Rep again;
  o.workers = 3;
  REQUIRE(hdm_run("eigentable", js.c_str(), &o, &again.p) == HDM_OK);
  CHECK(js == hdm_report_render(again.p, HDM_FORMAT_JSON));

  Rep over;
  o.alpha_max = 5;
  REQUIRE(hdm_run("eigentable", cfg, &o, &over.p) == HDM_OK);
  CHECK(std::string(hdm_report_render(over.p, HDM_FORMAT_CSV)).find("\n5,") != std::string::npos);

  Rep bad;
  CHECK(hdm_run("eigentable", "{\"dimension\": 1}", &o, &bad.p) == HDM_CONFIG_ERROR);
  CHECK(std::string(hdm_last_error()).find("config.distribution") != std::string::npos);
  CHECK(hdm_run("nope", cfg, &o, &bad.p) == HDM_CONFIG_ERROR);
  CHECK(std::string(hdm_command_names()).find("support-check") != std::string::npos);
}
