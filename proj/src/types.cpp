#include "hadamard/types.hpp"

#include <algorithm>
#include <sstream>

namespace hadamard {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnderivableOrder: return "UnderivableOrder";
    case ErrorCode::QuadratureNoConvergence: return "QuadratureNoConvergence";
    case ErrorCode::SupportTouchesHyperplane: return "SupportTouchesHyperplane";
    case ErrorCode::ContainsZero: return "ContainsZero";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::IndeterminateProduct: return "IndeterminateProduct";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ApproximateVStar: return "ApproximateVStar";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

void check_dimension(int d) {
  if (d < 1 || d > kMaxDim)
    fail(ErrorCode::InvalidArgument, "dimension must be in 1.." + std::to_string(kMaxDim));
}

Point::Point(int d, double fill) : dim(d) {
  check_dimension(d);
  for (int j = 0; j < d; ++j) c[j] = fill;
}

Point::Point(std::initializer_list<double> values) : dim(static_cast<int>(values.size())) {
  check_dimension(dim);
  std::copy(values.begin(), values.end(), c.begin());
}

bool Point::operator==(const Point& o) const {
  if (dim != o.dim) return false;
  for (int j = 0; j < dim; ++j)
    if (c[j] != o.c[j]) return false;
  return true;
}

Point operator*(const Point& a, const Point& b) {
  if (a.dim != b.dim) fail(ErrorCode::InvalidArgument, "dimension mismatch in point product");
  Point r(a.dim);
  for (int j = 0; j < a.dim; ++j) r[j] = a[j] * b[j];
  return r;
}

MultiIndex::MultiIndex(int d, int fill) : dim(d) {
  check_dimension(d);
  for (int j = 0; j < d; ++j) k[j] = fill;
}

MultiIndex::MultiIndex(std::initializer_list<int> values) : dim(static_cast<int>(values.size())) {
  check_dimension(dim);
  std::copy(values.begin(), values.end(), k.begin());
  for (int j = 0; j < dim; ++j)
    if (k[j] < 0) fail(ErrorCode::InvalidArgument, "negative multi-index component");
}

int MultiIndex::total() const {
  int s = 0;
  for (int j = 0; j < dim; ++j) s += k[j];
  return s;
}

int MultiIndex::max() const {
  int m = 0;
  for (int j = 0; j < dim; ++j) m = std::max(m, k[j]);
  return m;
}

bool MultiIndex::operator==(const MultiIndex& o) const {
  if (dim != o.dim) return false;
  for (int j = 0; j < dim; ++j)
    if (k[j] != o.k[j]) return false;
  return true;
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  if (dim != o.dim) return dim < o.dim;
  for (int j = 0; j < dim; ++j)
    if (k[j] != o.k[j]) return k[j] < o.k[j];
  return false;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (int j = 0; j < dim; ++j) os << (j ? "," : "") << k[j];
  os << ')';
  return os.str();
}

std::vector<MultiIndex> multi_index_grid(int d, int max_each) {
  check_dimension(d);
  std::vector<MultiIndex> out;
  MultiIndex a(d);
  while (true) {
    out.push_back(a);
    int j = d - 1;
    while (j >= 0 && a[j] == max_each) {
      a[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++a[j];
  }
  return out;
}

}  // namespace hadamard
