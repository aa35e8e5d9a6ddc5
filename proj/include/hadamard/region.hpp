#pragma once

// Exact dilation-set algebra on finite unions of axis-aligned boxes.
//
// Endpoints are exact rationals (or +-infinity) with open/closed flags, so
// membership, closure, complement, reciprocals and coordinatewise products
// are computed without rounding. Most set operations reduce to a cell
// decomposition: the finite endpoints of every box involved cut each axis
// into open intervals and single points, each resulting product cell lies
// entirely inside or entirely outside every box, and one representative point
// per cell decides it.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/types.hpp"

namespace hadamard {

using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion of a finite double to a rational.
Rational to_rational(double x);
double to_double(const Rational& r);
/// Parses "3", "-1.25", "1e-3", "2/3". Throws ConfigError on malformed input.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

/// Extended real number: -inf, a finite rational, or +inf.
class XReal {
 public:
  XReal() = default;
  XReal(const Rational& v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  XReal(int v) : value_(v) {}              // NOLINT(google-explicit-constructor)
  static XReal neg_inf() { return XReal(-1, Rational(0)); }
  static XReal pos_inf() { return XReal(1, Rational(0)); }

  bool finite() const { return inf_ == 0; }
  int inf_sign() const { return inf_; }
  const Rational& value() const { return value_; }
  int sign() const;
  double to_double() const;
  std::string str() const;

  friend bool operator==(const XReal& a, const XReal& b);
  friend bool operator<(const XReal& a, const XReal& b);
  friend bool operator<=(const XReal& a, const XReal& b) { return !(b < a); }
  friend bool operator>(const XReal& a, const XReal& b) { return b < a; }
  friend bool operator>=(const XReal& a, const XReal& b) { return !(a < b); }
  /// Throws IndeterminateProduct for 0 * inf.
  friend XReal operator*(const XReal& a, const XReal& b);

 private:
  XReal(int inf, const Rational& v) : inf_(inf), value_(v) {}
  int inf_ = 0;
  Rational value_{0};
};

struct Interval {
  XReal lo = XReal::neg_inf();
  XReal hi = XReal::pos_inf();
  bool lo_closed = false;
  bool hi_closed = false;

  /// Infinite endpoints are always stored open.
  static Interval make(const XReal& lo, bool lo_closed, const XReal& hi, bool hi_closed);
  static Interval closed(const Rational& a, const Rational& b) { return make(a, true, b, true); }
  static Interval open(const XReal& a, const XReal& b) { return make(a, false, b, false); }
  static Interval point(const Rational& a) { return make(a, true, a, true); }
  static Interval line() { return Interval{}; }
  /// Grammar: "[a,b)", "(a,inf)", "(-inf,2]", "{a}".
  static Interval parse(std::string_view text);

  bool empty() const;
  bool is_point() const { return lo.finite() && hi.finite() && lo == hi && lo_closed && hi_closed; }
  bool bounded() const { return lo.finite() && hi.finite(); }
  bool contains(const Rational& x) const;
  bool contains_zero() const { return contains(Rational(0)); }
  bool operator==(const Interval& o) const;
  std::string str() const;
};

struct Box {
  std::vector<Interval> sides;

  Box() = default;
  explicit Box(std::vector<Interval> s) : sides(std::move(s)) {}
  static Box point(const std::vector<Rational>& x);
  static Box point(const Point& x);

  int dim() const { return static_cast<int>(sides.size()); }
  bool empty() const;
  bool contains(const std::vector<Rational>& x) const;
  bool operator==(const Box& o) const { return sides == o.sides; }
  std::string str() const;
};

using RPoint = std::vector<Rational>;
RPoint to_rpoint(const Point& p);
Point to_point(const RPoint& p);

class Region {
 public:
  Region() = default;
  explicit Region(int dim);
  Region(int dim, std::vector<Box> boxes);
  static Region full(int dim);
  static Region from_box(Box b);
  static Region from_interval(const Interval& iv) { return from_box(Box({iv})); }
  static Region point(const Point& p) { return from_box(Box::point(p)); }

  int dim() const { return dim_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }
  bool contains(const RPoint& x) const;
  bool contains(const Point& x) const;
  bool is_open() const;
  bool is_bounded() const;
  /// Smallest box containing the region (empty region -> empty optional).
  std::optional<Box> hull() const;
  std::string str() const;

 private:
  int dim_ = 0;
  std::vector<Box> boxes_;
};

// Set operations. All are exact.
Region unite(const Region& a, const Region& b);
Region intersect(const Region& a, const Region& b);
Region complement(const Region& a);
Region difference(const Region& a, const Region& b);
Region closure(const Region& a);
Region interior(const Region& a);
bool subset(const Region& a, const Region& b);
bool same_set(const Region& a, const Region& b);
/// Merges boxes; canonical (sorted, disjoint, maximal) in one dimension.
Region simplify(const Region& a);
/// Same set as pairwise disjoint boxes.
Region disjoint_boxes(const Region& a);
/// Some point of the region, chosen deterministically.
std::optional<RPoint> any_point(const Region& a);

/// W_eps = { x : min_j |x_j| >= eps }.
Region w_eps(const Rational& eps, int d);
/// Coordinatewise reciprocal. Throws ContainsZero if a box meets a coordinate zero.
Region reciprocal(const Region& a);
/// { ab : a in A, b in B } with exact flags.
Region product_set(const Region& a, const Region& b);
/// a * region for a single dilation factor a.
Region dilate(const Region& r, const RPoint& a);
/// inf over the region of min_j |x_j|; +inf for the empty region.
XReal hyperplane_distance(const Region& r);
/// Shrinks every box by the given fraction of its width per side; infinite
/// sides are clipped to [-1/fraction, 1/fraction]. Result is a closed box union.
Region shrink_to_compact(const Region& open_region, const Rational& fraction);

/// Union of zero-pattern strata { y : y_j == 0 exactly for j in Z }.
struct StratifiedSet {
  int dim = 0;
  std::set<unsigned> patterns;  // bitmask over coordinates

  bool contains_pattern(unsigned z) const { return patterns.count(z) != 0; }
  bool is_full_space() const { return patterns.size() == (1u << dim); }
  bool is_nonzero_orthant_union() const { return patterns.size() == 1 && contains_pattern(0); }
  /// R^d minus the origin: every pattern except the all-zero one.
  bool is_punctured_space() const;
  bool contains(const Point& y) const;
  std::string str() const;
  std::vector<std::string> pattern_strings() const;
};

/// Closure of an open region under invertible dilations.
StratifiedSet omega_tilde(const Region& omega);

struct VStarResult {
  Region set;
  bool exact = true;
  Region unknown_band;
};

/// V_*(M, N) = { eta with all eta_j != 0 : eta M subset of N }.
VStarResult v_star(const Region& m, const Region& n);

struct DualityReport {
  Region lhs;  // V_*(M^c, N^c)
  Region rhs;  // 1 / V_*(N, M)
  bool equal = false;
  Region lhs_minus_rhs;
  Region rhs_minus_lhs;
};
DualityReport duality_check(const Region& m, const Region& n);

/// Cartesian product of one-dimensional regions.
Region cartesian(const std::vector<Region>& factors);
/// Projection onto one coordinate.
Region project(const Region& r, int axis);
/// True if the region equals the Cartesian product of its projections.
bool is_product_region(const Region& r);

}  // namespace hadamard
