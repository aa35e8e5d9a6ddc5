#pragma once

// Declarative experiment configs and the batch commands built on them.
//
// A config is a JSON object. Regions are lists of boxes, each box a list of
// interval strings such as "(0,1]" (one per coordinate; a bare string is
// accepted in one dimension). Unknown fields are rejected, and every
// diagnostic names the offending field as config.<path>.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/distribution.hpp"
#include "hadamard/functions.hpp"
#include "hadamard/region.hpp"

namespace hadamard {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUnknown = 3;

/// Command-line values that replace the corresponding config fields.
struct ConfigOverrides {
  std::optional<int> alpha_max;
  std::optional<double> tol_quad;
  std::optional<double> tol_resid;
  std::optional<int> grid_n;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  int dimension = 0;
  std::optional<DistributionRep> distribution;
  std::optional<Region> domain;
  std::vector<TestFunction> test_functions;
  int random_test_functions = 0;  // extra bumps drawn from seed
  std::uint64_t seed = 0;
  int alpha_max = 8;
  double tol_quad = 1e-10;
  double tol_resid = 1e-7;
  int support_levels = 10;
  std::optional<Region> vstar_m, vstar_n;
  std::optional<Density> conv_s, conv_t;
  std::vector<Point> points;  // convolve: extra evaluation points
  bool richardson = true;
  double coarse_tolerance = 1e-4;
  int grid_n = 4096;
  /// The document with overrides applied, serialized canonically.
  std::string canonical;
};

/// Throws ConfigError. A JSON report written by run() is accepted as well,
/// in which case the config embedded in it is used.
ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

enum class ReportFormat { Text, Json, Csv };

struct RunReport {
  std::string command;
  int exit_code = kExitPass;
  std::string json;
  std::string text;
  std::string csv;
  const std::string& render(ReportFormat f) const;
};

const std::vector<std::string>& command_names();

struct RunOptions {
  int workers = 1;  // never changes results
};

/// Throws ConfigError for an unknown command or a config missing what the
/// command needs. Numerical failures are reported, not thrown.
RunReport run(std::string_view command, const ExperimentConfig& config, const RunOptions& opts = {});

}  // namespace hadamard
