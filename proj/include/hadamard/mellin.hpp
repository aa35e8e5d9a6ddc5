#pragma once

// Multiplicative convolution of densities,
//   (s * t)(z) = int s(y) t(z / y) prod_j |y_j|^-1 dy,
// by quadrature (oracle) and by FFT on a logarithmic grid per sign quadrant.
// Under x = sigma e^u the measure dy / |y| becomes du, so the log-domain
// samples carry no extra weight.

#include <array>
#include <string>
#include <vector>

#include "hadamard/distribution.hpp"
#include "hadamard/quadrature.hpp"

namespace hadamard {

/// Uniform grids in u = log|x|: s is sampled from s_origin, t from t_origin,
/// and the result lives on s_origin + t_origin + m * step.
struct LogGrid {
  int dim = 0;
  int n = 0;  // samples per axis, a power of two
  std::array<double, kMaxDim> s_origin{}, t_origin{}, step{};
  double origin(int j) const { return s_origin[static_cast<std::size_t>(j)] + t_origin[static_cast<std::size_t>(j)]; }
  LogGrid refined() const;  // 2n samples at half the step, same origins
};

/// Grid with n samples per axis whose first half covers the support image.
/// The wider log-support is aligned with whole steps.
LogGrid plan_grid(const Density& s, const Density& t, int n);

struct QuadrantSamples {
  std::array<int, kMaxDim> signs{};
  std::vector<double> values;  // n^dim, last axis fastest
};

struct ConvolveOptions {
  bool richardson = true;
  double coarse_tolerance = 1e-4;  // relative n vs 2n discrepancy
  int workers = 1;
};

struct MellinResult {
  LogGrid grid;
  std::array<int, kMaxDim> used{};  // samples per axis that can be nonzero
  std::vector<QuadrantSamples> quadrants;
  double discrepancy = 0.0;  // max |f_2n - f_n| / max |f_n|, 0 without refinement
  double total_mass = 0.0;   // int (s * t)(z) dz

  int dim() const { return grid.dim; }
  /// Interpolated in log coordinates; 0 outside the sampled image.
  double value_at(const Point& z) const;
  /// The grid point of a flat index within a quadrant.
  Point point(const QuadrantSamples& q, std::size_t index) const;
};

MellinResult convolve_fast(const Density& s, const Density& t, const LogGrid& grid, const ConvolveOptions& opts = {});
MellinResult convolve_fast(const Density& s, const Density& t, int n, const ConvolveOptions& opts = {});

/// Direct evaluation of the induced density at z.
double convolve_oracle(const Density& s, const Density& t, const Point& z,
                       const QuadratureOptions& opts = {1e-10, 0.0, 30});

/// int s(x) dx.
double density_mass(const Density& s, const QuadratureOptions& opts = {1e-12, 1e-13, 30});

/// A one-dimensional result as a density with tabulated log-linear kernels.
Density to_density(const MellinResult& r);

struct BenchReport {
  int n = 0;
  double fast_seconds = 0.0;
  double oracle_seconds = 0.0;  // extrapolated to all grid points when sampled
  long oracle_points = 0;
  long grid_points = 0;
  double speedup = 0.0;
  double max_rel_error = 0.0;
};

/// Times convolve_fast against the oracle on the output grid for two fixed
/// smooth densities in one dimension.
BenchReport bench_compare(int n, int workers = 1);

}  // namespace hadamard
