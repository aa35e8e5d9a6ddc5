#pragma once

// Basic value types shared by every module: points, multi-indices and the
// library error type.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace hadamard {

inline constexpr int kMaxDim = 3;

enum class ErrorCode {
  InvalidArgument,
  UnderivableOrder,
  QuadratureNoConvergence,
  SupportTouchesHyperplane,
  ContainsZero,
  EmptyRegion,
  OrderTooLarge,
  IndeterminateProduct,
  GridTooCoarse,
  ApproximateVStar,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

void check_dimension(int d);

struct Point {
  int dim = 0;
  std::array<double, kMaxDim> c{};

  Point() = default;
  explicit Point(int d, double fill = 0.0);
  Point(std::initializer_list<double> values);
  static Point ones(int d) { return Point(d, 1.0); }

  double& operator[](int j) { return c[static_cast<std::size_t>(j)]; }
  double operator[](int j) const { return c[static_cast<std::size_t>(j)]; }
  bool operator==(const Point& o) const;
};

/// Coordinatewise product xy.
Point operator*(const Point& a, const Point& b);

struct MultiIndex {
  int dim = 0;
  std::array<int, kMaxDim> k{};

  MultiIndex() = default;
  explicit MultiIndex(int d, int fill = 0);
  MultiIndex(std::initializer_list<int> values);

  int& operator[](int j) { return k[static_cast<std::size_t>(j)]; }
  int operator[](int j) const { return k[static_cast<std::size_t>(j)]; }
  int total() const;
  int max() const;
  bool operator==(const MultiIndex& o) const;
  bool operator<(const MultiIndex& o) const;  // lexicographic
  std::string str() const;
};

/// All multi-indices of dimension d with every component in [0, max_each],
/// in lexicographic order.
std::vector<MultiIndex> multi_index_grid(int d, int max_each);

}  // namespace hadamard
