#ifndef HADAMARD_H
#define HADAMARD_H

/* C interface to the hadamard library.
 *
 * Objects are opaque handles created from JSON literals (the same grammar as
 * experiment configs) and released with the matching _free function. Every
 * fallible call returns an hdm_status; on failure hdm_last_error() holds a
 * message for the calling thread until its next failing call. Strings
 * returned by the library are owned by the handle they came from. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HDM_API __declspec(dllexport)
#else
#define HDM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hdm_status {
  HDM_OK = 0,
  HDM_INVALID_ARGUMENT = 1,
  HDM_UNDERIVABLE_ORDER = 2,
  HDM_QUADRATURE_NO_CONVERGENCE = 3,
  HDM_SUPPORT_TOUCHES_HYPERPLANE = 4,
  HDM_CONTAINS_ZERO = 5,
  HDM_EMPTY_REGION = 6,
  HDM_ORDER_TOO_LARGE = 7,
  HDM_INDETERMINATE_PRODUCT = 8,
  HDM_GRID_TOO_COARSE = 9,
  HDM_APPROXIMATE_VSTAR = 10,
  HDM_CONFIG_ERROR = 11,
  HDM_INTERNAL_ERROR = 12
} hdm_status;

typedef enum hdm_format { HDM_FORMAT_TEXT = 0, HDM_FORMAT_JSON = 1, HDM_FORMAT_CSV = 2 } hdm_format;

typedef enum hdm_verdict {
  HDM_ADMISSIBLE = 0,
  HDM_NOT_ADMISSIBLE = 1,
  HDM_NECESSARY_CONDITIONS_HOLD = 2,
  HDM_VERDICT_UNKNOWN = 3
} hdm_verdict;

typedef enum hdm_support_outcome { HDM_SUPPORT_HOLDS = 0, HDM_SUPPORT_FAILS = 1, HDM_SUPPORT_UNKNOWN = 2 } hdm_support_outcome;

typedef struct hdm_region hdm_region;
typedef struct hdm_distribution hdm_distribution;
typedef struct hdm_test_function hdm_test_function;
typedef struct hdm_report hdm_report;

HDM_API const char* hdm_version(void);
HDM_API const char* hdm_status_name(hdm_status status);
HDM_API const char* hdm_last_error(void);

/* Region literal: a JSON list of boxes, each a list of interval strings. */
HDM_API hdm_status hdm_region_from_json(int dim, const char* json, hdm_region** out);
HDM_API void hdm_region_free(hdm_region* r);
HDM_API int hdm_region_dim(const hdm_region* r);
HDM_API const char* hdm_region_str(const hdm_region* r);

/* Distribution literal: {"kind": "point_masses" | "density" | "euler" | "euler_polynomial", ...}. */
HDM_API hdm_status hdm_distribution_from_json(int dim, const char* json, hdm_distribution** out);
/* weight * delta^(order)_anchor; order may be NULL for the plain point mass. */
HDM_API hdm_status hdm_distribution_delta(int dim, const double* anchor, const int* order, double weight,
                                          hdm_distribution** out);
HDM_API void hdm_distribution_free(hdm_distribution* t);
HDM_API int hdm_distribution_dim(const hdm_distribution* t);
HDM_API const char* hdm_distribution_describe(const hdm_distribution* t);

/* Test function literal: {"type": "bump" | "plateau" | "sum", ...}. */
HDM_API hdm_status hdm_test_function_from_json(int dim, const char* json, hdm_test_function** out);
HDM_API hdm_status hdm_test_function_bump(int dim, const double* center, const double* radius,
                                          hdm_test_function** out);
HDM_API void hdm_test_function_free(hdm_test_function* f);
HDM_API hdm_status hdm_test_function_value(const hdm_test_function* f, const double* x, double* out);

/* <T, phi>. */
HDM_API hdm_status hdm_pair(const hdm_distribution* t, const hdm_test_function* phi, double* out);
/* (M phi)(y) = T_x phi(x y). */
HDM_API hdm_status hdm_transpose_value(const hdm_distribution* t, const hdm_test_function* phi, const double* y,
                                       double* out);
/* m_alpha = T(sigma(x) x^(-alpha-1)). */
HDM_API hdm_status hdm_eigenvalue(const hdm_distribution* t, const int* alpha, double* out);
/* Residual of the monomial eigen equation for one test function. */
HDM_API hdm_status hdm_verify_monomial(const hdm_distribution* t, const int* alpha, const hdm_test_function* phi,
                                       double tolerance, double* residual, double* scale, int* pass);

HDM_API hdm_status hdm_support_condition(const hdm_distribution* t, const hdm_region* omega, int levels,
                                         hdm_support_outcome* out);
HDM_API hdm_status hdm_classify(const hdm_distribution* t, const hdm_region* omega, hdm_verdict* out);
HDM_API hdm_status hdm_euler_only(const hdm_region* omega, int* out);

/* (s * t)(z) via the FFT path; s and t must be densities. */
HDM_API hdm_status hdm_convolve_value(const hdm_distribution* s, const hdm_distribution* t, int grid_n,
                                      const double* z, double* out);

typedef struct hdm_run_options {
  int alpha_max;     /* < 0: keep the config value */
  double tol_quad;   /* <= 0: keep */
  double tol_resid;  /* <= 0: keep */
  int grid_n;        /* <= 0: keep */
  int has_seed;
  uint64_t seed;
  int workers;       /* <= 0: one */
} hdm_run_options;

HDM_API void hdm_run_options_init(hdm_run_options* opts);
/* Parses the config and runs one command. HDM_CONFIG_ERROR for a malformed
 * config or unknown command; other outcomes are carried by the report. */
HDM_API hdm_status hdm_run(const char* command, const char* config_json, const hdm_run_options* opts,
                           hdm_report** out);
HDM_API int hdm_report_exit_code(const hdm_report* r);
HDM_API const char* hdm_report_render(const hdm_report* r, hdm_format format);
HDM_API void hdm_report_free(hdm_report* r);

/* Space-separated command names. */
HDM_API const char* hdm_command_names(void);

#ifdef __cplusplus
}
#endif

#endif
