#include "hadamard/hadamard.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "hadamard/classifier.hpp"
#include "hadamard/cli.hpp"
#include "hadamard/hadamard_action.hpp"
#include "hadamard/mellin.hpp"

struct hdm_region {
  hadamard::Region region;
  std::string text;
};

struct hdm_distribution {
  hadamard::DistributionRep rep;
  std::string text;
};

struct hdm_test_function {
  hadamard::TestFunction fn;
};

struct hdm_report {
  hadamard::RunReport report;
};

namespace {

thread_local std::string g_last_error;

hdm_status status_of(hadamard::ErrorCode c) {
  using hadamard::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return HDM_INVALID_ARGUMENT;
    case ErrorCode::UnderivableOrder: return HDM_UNDERIVABLE_ORDER;
    case ErrorCode::QuadratureNoConvergence: return HDM_QUADRATURE_NO_CONVERGENCE;
    case ErrorCode::SupportTouchesHyperplane: return HDM_SUPPORT_TOUCHES_HYPERPLANE;
    case ErrorCode::ContainsZero: return HDM_CONTAINS_ZERO;
    case ErrorCode::EmptyRegion: return HDM_EMPTY_REGION;
    case ErrorCode::OrderTooLarge: return HDM_ORDER_TOO_LARGE;
    case ErrorCode::IndeterminateProduct: return HDM_INDETERMINATE_PRODUCT;
    case ErrorCode::GridTooCoarse: return HDM_GRID_TOO_COARSE;
    case ErrorCode::ApproximateVStar: return HDM_APPROXIMATE_VSTAR;
    case ErrorCode::ConfigError: return HDM_CONFIG_ERROR;
  }
  return HDM_INTERNAL_ERROR;
}

hdm_status set_error(hdm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
hdm_status guarded(F&& body) {
  try {
    body();
    return HDM_OK;
  } catch (const hadamard::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HDM_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HDM_INTERNAL_ERROR, e.what());
  } catch (...) {
    return set_error(HDM_INTERNAL_ERROR, "unknown failure");
  }
}

#define HDM_REQUIRE(cond, what) \
  if (!(cond)) return set_error(HDM_INVALID_ARGUMENT, what)

// Literals go through the config parser so both surfaces share one grammar.
std::string wrap(int dim, const char* field, const char* literal, const char* close = "") {
  return std::string("{\"dimension\": ") + std::to_string(dim) + ", " + field + literal + close + "}";
}

hadamard::Point point_of(int dim, const double* v) {
  hadamard::Point p(dim);
  for (int j = 0; j < dim; ++j) p[j] = v[j];
  return p;
}

hadamard::MultiIndex index_of(int dim, const int* v) {
  hadamard::MultiIndex m(dim);
  for (int j = 0; j < dim; ++j) {
    if (v[j] < 0) hadamard::fail(hadamard::ErrorCode::InvalidArgument, "multi-index entries must be non-negative");
    m[j] = v[j];
  }
  return m;
}

}  // namespace

extern "C" {

const char* hdm_version(void) { return "0.1.0"; }

const char* hdm_status_name(hdm_status s) {
  switch (s) {
    case HDM_OK: return "ok";
    case HDM_INVALID_ARGUMENT: return "invalid argument";
    case HDM_UNDERIVABLE_ORDER: return "underivable order";
    case HDM_QUADRATURE_NO_CONVERGENCE: return "quadrature did not converge";
    case HDM_SUPPORT_TOUCHES_HYPERPLANE: return "support touches a coordinate hyperplane";
    case HDM_CONTAINS_ZERO: return "region contains zero";
    case HDM_EMPTY_REGION: return "empty region";
    case HDM_ORDER_TOO_LARGE: return "order too large";
    case HDM_INDETERMINATE_PRODUCT: return "indeterminate product";
    case HDM_GRID_TOO_COARSE: return "grid too coarse";
    case HDM_APPROXIMATE_VSTAR: return "approximate dilation set";
    case HDM_CONFIG_ERROR: return "config error";
    case HDM_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* hdm_last_error(void) { return g_last_error.c_str(); }

hdm_status hdm_region_from_json(int dim, const char* json, hdm_region** out) {
  HDM_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = hadamard::parse_config(wrap(dim, "\"vstar\": {\"m\": ", json, "}"));
    *out = new hdm_region{*cfg.vstar_m, cfg.vstar_m->str()};
  });
}

void hdm_region_free(hdm_region* r) { delete r; }
int hdm_region_dim(const hdm_region* r) { return r ? r->region.dim() : 0; }
const char* hdm_region_str(const hdm_region* r) { return r ? r->text.c_str() : ""; }

hdm_status hdm_distribution_from_json(int dim, const char* json, hdm_distribution** out) {
  HDM_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = hadamard::parse_config(wrap(dim, "\"distribution\": ", json));
    *out = new hdm_distribution{*cfg.distribution, cfg.distribution->describe()};
  });
}

hdm_status hdm_distribution_delta(int dim, const double* anchor, const int* order, double weight,
                                  hdm_distribution** out) {
  HDM_REQUIRE(anchor && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    hadamard::check_dimension(dim);
    hadamard::MultiIndex m = order ? index_of(dim, order) : hadamard::MultiIndex(dim);
    auto t = hadamard::DistributionRep::delta(point_of(dim, anchor), m, weight);
    *out = new hdm_distribution{t, t.describe()};
  });
}

void hdm_distribution_free(hdm_distribution* t) { delete t; }
int hdm_distribution_dim(const hdm_distribution* t) { return t ? t->rep.dim() : 0; }
const char* hdm_distribution_describe(const hdm_distribution* t) { return t ? t->text.c_str() : ""; }

hdm_status hdm_test_function_from_json(int dim, const char* json, hdm_test_function** out) {
  HDM_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = hadamard::parse_config(wrap(dim, "\"test_functions\": [", json, "]"));
    *out = new hdm_test_function{cfg.test_functions.at(0)};
  });
}

hdm_status hdm_test_function_bump(int dim, const double* center, const double* radius, hdm_test_function** out) {
  HDM_REQUIRE(center && radius && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    hadamard::check_dimension(dim);
    *out = new hdm_test_function{hadamard::TestFunction::bump(point_of(dim, center), point_of(dim, radius))};
  });
}

void hdm_test_function_free(hdm_test_function* f) { delete f; }

hdm_status hdm_test_function_value(const hdm_test_function* f, const double* x, double* out) {
  HDM_REQUIRE(f && x && out, "null argument");
  return guarded([&] { *out = f->fn.value(point_of(f->fn.dim(), x)); });
}

hdm_status hdm_pair(const hdm_distribution* t, const hdm_test_function* phi, double* out) {
  HDM_REQUIRE(t && phi && out, "null argument");
  HDM_REQUIRE(t->rep.dim() == phi->fn.dim(), "dimension mismatch");
  return guarded([&] { *out = hadamard::pair(t->rep, phi->fn); });
}

hdm_status hdm_transpose_value(const hdm_distribution* t, const hdm_test_function* phi, const double* y, double* out) {
  HDM_REQUIRE(t && phi && y && out, "null argument");
  HDM_REQUIRE(t->rep.dim() == phi->fn.dim(), "dimension mismatch");
  return guarded([&] { *out = hadamard::transpose_apply(t->rep, phi->fn).value(point_of(t->rep.dim(), y)); });
}

hdm_status hdm_eigenvalue(const hdm_distribution* t, const int* alpha, double* out) {
  HDM_REQUIRE(t && alpha && out, "null argument");
  return guarded([&] { *out = hadamard::eigenvalue(t->rep, index_of(t->rep.dim(), alpha)); });
}

hdm_status hdm_verify_monomial(const hdm_distribution* t, const int* alpha, const hdm_test_function* phi,
                               double tolerance, double* residual, double* scale, int* pass) {
  HDM_REQUIRE(t && alpha && phi, "null argument");
  HDM_REQUIRE(t->rep.dim() == phi->fn.dim(), "dimension mismatch");
  HDM_REQUIRE(tolerance > 0.0, "tolerance must be positive");
  return guarded([&] {
    auto rep = hadamard::verify_monomial_eq(t->rep, index_of(t->rep.dim(), alpha), phi->fn, tolerance);
    if (residual) *residual = rep.residual;
    if (scale) *scale = rep.scale;
    if (pass) *pass = rep.pass ? 1 : 0;
  });
}

hdm_status hdm_support_condition(const hdm_distribution* t, const hdm_region* omega, int levels,
                                 hdm_support_outcome* out) {
  HDM_REQUIRE(t && omega && out, "null argument");
  HDM_REQUIRE(levels > 0, "levels must be positive");
  return guarded([&] {
    auto s = hadamard::support_condition(t->rep, omega->region, levels);
    *out = s.outcome == hadamard::SupportOutcome::Holds   ? HDM_SUPPORT_HOLDS
           : s.outcome == hadamard::SupportOutcome::Fails ? HDM_SUPPORT_FAILS
                                                           : HDM_SUPPORT_UNKNOWN;
  });
}

hdm_status hdm_classify(const hdm_distribution* t, const hdm_region* omega, hdm_verdict* out) {
  HDM_REQUIRE(t && omega && out, "null argument");
  return guarded([&] {
    auto v = hadamard::admissible(t->rep, omega->region);
    switch (v.kind) {
      case hadamard::VerdictKind::Admissible: *out = HDM_ADMISSIBLE; break;
      case hadamard::VerdictKind::NotAdmissible: *out = HDM_NOT_ADMISSIBLE; break;
      case hadamard::VerdictKind::NecessaryConditionsHold: *out = HDM_NECESSARY_CONDITIONS_HOLD; break;
      default: *out = HDM_VERDICT_UNKNOWN;
    }
  });
}

hdm_status hdm_euler_only(const hdm_region* omega, int* out) {
  HDM_REQUIRE(omega && out, "null argument");
  return guarded([&] { *out = hadamard::euler_only(omega->region) ? 1 : 0; });
}

hdm_status hdm_convolve_value(const hdm_distribution* s, const hdm_distribution* t, int grid_n, const double* z,
                              double* out) {
  HDM_REQUIRE(s && t && z && out, "null argument");
  HDM_REQUIRE(s->rep.kind() == hadamard::DistributionKind::Density &&
                  t->rep.kind() == hadamard::DistributionKind::Density,
              "convolution needs two densities");
  return guarded([&] {
    auto r = hadamard::convolve_fast(s->rep.as_density(), t->rep.as_density(), grid_n);
    *out = r.value_at(point_of(s->rep.dim(), z));
  });
}

void hdm_run_options_init(hdm_run_options* opts) {
  if (!opts) return;
  opts->alpha_max = -1;
  opts->tol_quad = 0.0;
  opts->tol_resid = 0.0;
  opts->grid_n = 0;
  opts->has_seed = 0;
  opts->seed = 0;
  opts->workers = 1;
}

hdm_status hdm_run(const char* command, const char* config_json, const hdm_run_options* opts, hdm_report** out) {
  HDM_REQUIRE(command && config_json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    hadamard::ConfigOverrides ov;
    hadamard::RunOptions ro;
    if (opts) {
      if (opts->alpha_max >= 0) ov.alpha_max = opts->alpha_max;
      if (opts->tol_quad > 0.0) ov.tol_quad = opts->tol_quad;
      if (opts->tol_resid > 0.0) ov.tol_resid = opts->tol_resid;
      if (opts->grid_n > 0) ov.grid_n = opts->grid_n;
      if (opts->has_seed) ov.seed = opts->seed;
      ro.workers = opts->workers > 0 ? opts->workers : 1;
    }
    bool known = false;
    for (const auto& c : hadamard::command_names()) known = known || c == command;
    if (!known) hadamard::fail(hadamard::ErrorCode::ConfigError, std::string("unknown command '") + command + "'");
    auto cfg = hadamard::parse_config(config_json, ov);
    *out = new hdm_report{hadamard::run(command, cfg, ro)};
  });
}

int hdm_report_exit_code(const hdm_report* r) { return r ? r->report.exit_code : hadamard::kExitConfig; }

const char* hdm_report_render(const hdm_report* r, hdm_format format) {
  if (!r) return "";
  auto f = format == HDM_FORMAT_JSON  ? hadamard::ReportFormat::Json
           : format == HDM_FORMAT_CSV ? hadamard::ReportFormat::Csv
                                      : hadamard::ReportFormat::Text;
  return r->report.render(f).c_str();
}

void hdm_report_free(hdm_report* r) { delete r; }

const char* hdm_command_names(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& c : hadamard::command_names()) s += (s.empty() ? "" : " ") + c;
    return s;
  }();
  return names.c_str();
}

}  // extern "C"
