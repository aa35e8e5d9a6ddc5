#include "hadamard/region.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>

namespace hadamard {

using boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Rationals

Rational to_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite value cannot be exact");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  auto m = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  cpp_int num(m);
  cpp_int den(1);
  if (exp >= 0)
    num <<= exp;
  else
    den <<= -exp;
  return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() -> Rational { fail(ErrorCode::ConfigError, "malformed number '" + s + "'"); };
  if (s.empty()) return bad();
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational p = parse_rational(s.substr(0, slash));
    Rational q = parse_rational(s.substr(slash + 1));
    if (q == 0) return bad();
    return p / q;
  }
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  cpp_int digits = 0;
  int frac_digits = 0;
  bool any = false;
  bool dot = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits = digits * 10 + (ch - '0');
      if (dot) ++frac_digits;
      any = true;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) return bad();
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return bad();
    ++i;
    std::size_t used = 0;
    try {
      exponent = std::stol(s.substr(i), &used);
    } catch (...) {
      return bad();
    }
    if (i + used != s.size() || std::labs(exponent) > 400) return bad();
  }
  exponent -= frac_digits;
  Rational r(digits);
  cpp_int p10 = 1;
  for (long e = 0; e < std::labs(exponent); ++e) p10 *= 10;
  if (exponent >= 0)
    r *= Rational(p10);
  else
    r /= Rational(p10);
  return neg ? Rational(-r) : r;
}

std::string format_rational(const Rational& r) {
  cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  cpp_int d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1 || std::max(twos, fives) > 30) return num.str() + "/" + den.str();
  int digits = std::max(twos, fives);
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  cpp_int scaled = num * (scale / den);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string s = scaled.str();
  while (static_cast<int>(s.size()) <= digits) s = "0" + s;
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return (neg ? "-" : "") + s;
}

// ---------------------------------------------------------------------------
// XReal

int XReal::sign() const {
  if (inf_ != 0) return inf_;
  return value_ > 0 ? 1 : (value_ < 0 ? -1 : 0);
}

double XReal::to_double() const {
  if (inf_ > 0) return HUGE_VAL;
  if (inf_ < 0) return -HUGE_VAL;
  return hadamard::to_double(value_);
}

std::string XReal::str() const {
  if (inf_ > 0) return "inf";
  if (inf_ < 0) return "-inf";
  return format_rational(value_);
}

bool operator==(const XReal& a, const XReal& b) {
  if (a.inf_ != b.inf_) return false;
  return a.inf_ != 0 || a.value_ == b.value_;
}

bool operator<(const XReal& a, const XReal& b) {
  if (a.inf_ != b.inf_) return a.inf_ < b.inf_ || (a.inf_ == 0 && b.inf_ > 0);
  if (a.inf_ != 0) return false;
  return a.value_ < b.value_;
}

XReal operator*(const XReal& a, const XReal& b) {
  if (a.finite() && b.finite()) return XReal(Rational(a.value_ * b.value_));
  int sa = a.sign(), sb = b.sign();
  if (sa == 0 || sb == 0) fail(ErrorCode::IndeterminateProduct, "0 * inf in set product");
  return sa * sb > 0 ? XReal::pos_inf() : XReal::neg_inf();
}

// ---------------------------------------------------------------------------
// Interval

Interval Interval::make(const XReal& lo, bool lo_closed, const XReal& hi, bool hi_closed) {
  Interval iv;
  iv.lo = lo;
  iv.hi = hi;
  iv.lo_closed = lo.finite() && lo_closed;
  iv.hi_closed = hi.finite() && hi_closed;
  return iv;
}

bool Interval::empty() const {
  if (lo < hi) return false;
  if (lo == hi) return !(lo.finite() && lo_closed && hi_closed);
  return true;
}

bool Interval::contains(const Rational& x) const {
  XReal v(x);
  bool above = lo_closed ? lo <= v : lo < v;
  bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

bool Interval::operator==(const Interval& o) const {
  return lo == o.lo && hi == o.hi && lo_closed == o.lo_closed && hi_closed == o.hi_closed;
}

std::string Interval::str() const {
  if (is_point()) return "{" + lo.str() + "}";
  std::string s;
  s += lo_closed ? '[' : '(';
  s += lo.str();
  s += ',';
  s += hi.str();
  s += hi_closed ? ']' : ')';
  return s;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

XReal parse_xreal(const std::string& t) {
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return XReal::pos_inf();
  if (t == "-inf" || t == "-infinity") return XReal::neg_inf();
  return XReal(parse_rational(t));
}

}  // namespace

Interval Interval::parse(std::string_view text) {
  std::string s = trim(text);
  auto bad = [&](const std::string& why) -> Interval {
    fail(ErrorCode::ConfigError, "malformed interval '" + s + "': " + why);
  };
  if (s.size() < 3) return bad("too short");
  if (s.front() == '{') {
    if (s.back() != '}') return bad("point literal must end with '}'");
    XReal a = parse_xreal(trim(std::string_view(s).substr(1, s.size() - 2)));
    if (!a.finite()) return bad("point must be finite");
    return point(a.value());
  }
  char open = s.front(), close = s.back();
  if ((open != '[' && open != '(') || (close != ']' && close != ')'))
    return bad("expected '[' or '(' ... ']' or ')'");
  std::string body = s.substr(1, s.size() - 2);
  auto comma = body.find(',');
  if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
    return bad("expected exactly one ','");
  XReal a = parse_xreal(trim(std::string_view(body).substr(0, comma)));
  XReal b = parse_xreal(trim(std::string_view(body).substr(comma + 1)));
  if ((!a.finite() && open == '[') || (!b.finite() && close == ']'))
    return bad("infinite endpoints must be open");
  if (a.inf_sign() > 0 || b.inf_sign() < 0) return bad("endpoints out of order");
  Interval iv = make(a, open == '[', b, close == ']');
  if (iv.empty()) return bad("interval is empty");
  return iv;
}

// ---------------------------------------------------------------------------
// Box / points

Box Box::point(const std::vector<Rational>& x) {
  Box b;
  for (const auto& v : x) b.sides.push_back(Interval::point(v));
  return b;
}

Box Box::point(const Point& x) { return point(to_rpoint(x)); }

bool Box::empty() const {
  for (const auto& s : sides)
    if (s.empty()) return true;
  return sides.empty();
}

bool Box::contains(const std::vector<Rational>& x) const {
  for (std::size_t j = 0; j < sides.size(); ++j)
    if (!sides[j].contains(x[j])) return false;
  return true;
}

std::string Box::str() const {
  std::string s;
  for (std::size_t j = 0; j < sides.size(); ++j) {
    if (j) s += "x";
    s += sides[j].str();
  }
  return s;
}

RPoint to_rpoint(const Point& p) {
  RPoint r;
  for (int j = 0; j < p.dim; ++j) r.push_back(to_rational(p[j]));
  return r;
}

Point to_point(const RPoint& p) {
  Point r(static_cast<int>(p.size()));
  for (std::size_t j = 0; j < p.size(); ++j) r[static_cast<int>(j)] = to_double(p[j]);
  return r;
}

// ---------------------------------------------------------------------------
// Region

Region::Region(int dim) : dim_(dim) { check_dimension(dim); }

Region::Region(int dim, std::vector<Box> boxes) : dim_(dim) {
  check_dimension(dim);
  for (auto& b : boxes) {
    if (b.dim() != dim) fail(ErrorCode::InvalidArgument, "box dimension mismatch");
    if (!b.empty()) boxes_.push_back(std::move(b));
  }
}

Region Region::full(int dim) {
  Box b(std::vector<Interval>(static_cast<std::size_t>(dim), Interval::line()));
  return Region(dim, {b});
}

Region Region::from_box(Box b) {
  int d = b.dim();
  return Region(d, {std::move(b)});
}

bool Region::contains(const RPoint& x) const {
  if (static_cast<int>(x.size()) != dim_) fail(ErrorCode::InvalidArgument, "point dimension mismatch");
  for (const auto& b : boxes_)
    if (b.contains(x)) return true;
  return false;
}

bool Region::contains(const Point& x) const { return contains(to_rpoint(x)); }

bool Region::is_open() const {
  bool flags_open = true;
  for (const auto& b : boxes_)
    for (const auto& s : b.sides)
      if (s.lo_closed || s.hi_closed) flags_open = false;
  return flags_open || same_set(interior(*this), *this);
}

bool Region::is_bounded() const {
  for (const auto& b : boxes_)
    for (const auto& s : b.sides)
      if (!s.bounded()) return false;
  return true;
}

std::optional<Box> Region::hull() const {
  if (boxes_.empty()) return std::nullopt;
  Box h = boxes_.front();
  for (const auto& b : boxes_) {
    for (int j = 0; j < dim_; ++j) {
      auto& hs = h.sides[static_cast<std::size_t>(j)];
      const auto& bs = b.sides[static_cast<std::size_t>(j)];
      if (bs.lo < hs.lo || (bs.lo == hs.lo && bs.lo_closed)) {
        hs.lo_closed = bs.lo_closed || (bs.lo == hs.lo && hs.lo_closed);
        hs.lo = bs.lo;
      }
      if (hs.hi < bs.hi || (bs.hi == hs.hi && bs.hi_closed)) {
        hs.hi_closed = bs.hi_closed || (bs.hi == hs.hi && hs.hi_closed);
        hs.hi = bs.hi;
      }
    }
  }
  return h;
}

std::string Region::str() const {
  if (boxes_.empty()) return "{}";
  std::string s;
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (i) s += " u ";
    s += boxes_[i].str();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Cell decomposition

namespace {

struct Piece {
  Interval iv;
  Rational rep;
  bool is_point = false;
};

std::vector<Piece> axis_pieces(std::vector<Rational> breaks) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<Piece> out;
  if (breaks.empty()) {
    out.push_back({Interval::line(), Rational(0), false});
    return out;
  }
  out.push_back({Interval::open(XReal::neg_inf(), breaks.front()), Rational(breaks.front() - 1), false});
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    out.push_back({Interval::point(breaks[i]), breaks[i], true});
    if (i + 1 < breaks.size())
      out.push_back({Interval::open(breaks[i], breaks[i + 1]), Rational((breaks[i] + breaks[i + 1]) / 2), false});
  }
  out.push_back({Interval::open(breaks.back(), XReal::pos_inf()), Rational(breaks.back() + 1), false});
  return out;
}

void add_breaks(const Region& r, int axis, std::vector<Rational>& out) {
  for (const auto& b : r.boxes()) {
    const auto& s = b.sides[static_cast<std::size_t>(axis)];
    if (s.lo.finite()) out.push_back(s.lo.value());
    if (s.hi.finite()) out.push_back(s.hi.value());
  }
}

class CellGrid {
 public:
  CellGrid(int dim, std::vector<std::vector<Piece>> pieces) : dim_(dim), pieces_(std::move(pieces)) {
    count_ = 1;
    for (const auto& p : pieces_) count_ *= p.size();
    if (count_ > 50'000'000) fail(ErrorCode::InvalidArgument, "region too complex for exact cell decomposition");
  }

  static CellGrid over(const std::vector<const Region*>& regions, int dim) {
    std::vector<std::vector<Piece>> pieces;
    for (int j = 0; j < dim; ++j) {
      std::vector<Rational> br;
      for (const auto* r : regions) add_breaks(*r, j, br);
      pieces.push_back(axis_pieces(std::move(br)));
    }
    return CellGrid(dim, std::move(pieces));
  }

  std::size_t count() const { return count_; }
  const std::vector<std::vector<Piece>>& pieces() const { return pieces_; }

  std::vector<std::size_t> index(std::size_t flat) const {
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim_));
    for (int j = dim_ - 1; j >= 0; --j) {
      auto n = pieces_[static_cast<std::size_t>(j)].size();
      idx[static_cast<std::size_t>(j)] = flat % n;
      flat /= n;
    }
    return idx;
  }

  std::size_t flat(const std::vector<std::size_t>& idx) const {
    std::size_t f = 0;
    for (int j = 0; j < dim_; ++j) f = f * pieces_[static_cast<std::size_t>(j)].size() + idx[static_cast<std::size_t>(j)];
    return f;
  }

  RPoint rep(const std::vector<std::size_t>& idx) const {
    RPoint p;
    for (int j = 0; j < dim_; ++j) p.push_back(pieces_[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]].rep);
    return p;
  }

  Box box(const std::vector<std::size_t>& idx) const {
    Box b;
    for (int j = 0; j < dim_; ++j) b.sides.push_back(pieces_[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]].iv);
    return b;
  }

 private:
  int dim_;
  std::vector<std::vector<Piece>> pieces_;
  std::size_t count_ = 1;
};

void require_same_dim(const Region& a, const Region& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::InvalidArgument, "region dimension mismatch");
}

// Union of the two intervals when it is itself an interval.
std::optional<Interval> merge_intervals(Interval a, Interval b) {
  if (b.lo < a.lo || (b.lo == a.lo && b.lo_closed && !a.lo_closed)) std::swap(a, b);
  // a starts first
  bool connected = b.lo < a.hi || (b.lo == a.hi && (a.hi_closed || b.lo_closed));
  if (!connected) return std::nullopt;
  Interval m = a;
  if (a.lo == b.lo) m.lo_closed = a.lo_closed || b.lo_closed;
  if (b.hi > a.hi) {
    m.hi = b.hi;
    m.hi_closed = b.hi_closed;
  } else if (b.hi == a.hi) {
    m.hi_closed = a.hi_closed || b.hi_closed;
  }
  return m;
}

bool interval_subset(const Interval& a, const Interval& b) {
  if (a.empty()) return true;
  bool lo_ok = b.lo < a.lo || (b.lo == a.lo && (b.lo_closed || !a.lo_closed));
  bool hi_ok = a.hi < b.hi || (a.hi == b.hi && (b.hi_closed || !a.hi_closed));
  return lo_ok && hi_ok;
}

bool box_subset(const Box& a, const Box& b) {
  for (std::size_t j = 0; j < a.sides.size(); ++j)
    if (!interval_subset(a.sides[j], b.sides[j])) return false;
  return true;
}

std::vector<Interval> canonical_1d(std::vector<Interval> ivs) {
  ivs.erase(std::remove_if(ivs.begin(), ivs.end(), [](const Interval& i) { return i.empty(); }), ivs.end());
  std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) {
    if (a.lo == b.lo) return a.lo_closed && !b.lo_closed;
    return a.lo < b.lo;
  });
  std::vector<Interval> out;
  for (const auto& iv : ivs) {
    if (!out.empty()) {
      if (auto m = merge_intervals(out.back(), iv)) {
        out.back() = *m;
        continue;
      }
    }
    out.push_back(iv);
  }
  return out;
}

Region from_cells(int dim, const CellGrid& grid, const std::vector<char>& member) {
  std::vector<Box> boxes;
  for (std::size_t f = 0; f < grid.count(); ++f)
    if (member[f]) boxes.push_back(grid.box(grid.index(f)));
  return simplify(Region(dim, std::move(boxes)));
}

}  // namespace

Region simplify(const Region& a) {
  int d = a.dim();
  if (d == 0) return a;
  if (d == 1) {
    std::vector<Interval> ivs;
    for (const auto& b : a.boxes()) ivs.push_back(b.sides[0]);
    std::vector<Box> boxes;
    for (auto& iv : canonical_1d(std::move(ivs))) boxes.push_back(Box({iv}));
    return Region(1, std::move(boxes));
  }
  std::vector<Box> boxes = a.boxes();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < boxes.size() && !changed; ++i) {
      for (std::size_t k = 0; k < boxes.size() && !changed; ++k) {
        if (i == k) continue;
        if (box_subset(boxes[k], boxes[i])) {
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(k));
          changed = true;
          break;
        }
        int diff = -1, ndiff = 0;
        for (int j = 0; j < d; ++j)
          if (!(boxes[i].sides[static_cast<std::size_t>(j)] == boxes[k].sides[static_cast<std::size_t>(j)])) {
            diff = j;
            ++ndiff;
          }
        if (ndiff != 1) continue;
        auto m = merge_intervals(boxes[i].sides[static_cast<std::size_t>(diff)], boxes[k].sides[static_cast<std::size_t>(diff)]);
        if (!m) continue;
        boxes[i].sides[static_cast<std::size_t>(diff)] = *m;
        boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
      }
    }
  }
  // deterministic order
  std::sort(boxes.begin(), boxes.end(), [](const Box& x, const Box& y) {
    for (std::size_t j = 0; j < x.sides.size(); ++j) {
      const auto& a1 = x.sides[j];
      const auto& b1 = y.sides[j];
      if (!(a1.lo == b1.lo)) return a1.lo < b1.lo;
      if (a1.lo_closed != b1.lo_closed) return a1.lo_closed;
      if (!(a1.hi == b1.hi)) return a1.hi < b1.hi;
      if (a1.hi_closed != b1.hi_closed) return !a1.hi_closed;
    }
    return false;
  });
  return Region(d, std::move(boxes));
}

Region unite(const Region& a, const Region& b) {
  require_same_dim(a, b);
  std::vector<Box> boxes = a.boxes();
  boxes.insert(boxes.end(), b.boxes().begin(), b.boxes().end());
  return simplify(Region(a.dim(), std::move(boxes)));
}

Region intersect(const Region& a, const Region& b) {
  require_same_dim(a, b);
  std::vector<Box> boxes;
  for (const auto& x : a.boxes()) {
    for (const auto& y : b.boxes()) {
      Box z;
      for (std::size_t j = 0; j < x.sides.size(); ++j) {
        const auto& p = x.sides[j];
        const auto& q = y.sides[j];
        Interval r;
        if (p.lo < q.lo) {
          r.lo = q.lo;
          r.lo_closed = q.lo_closed;
        } else if (q.lo < p.lo) {
          r.lo = p.lo;
          r.lo_closed = p.lo_closed;
        } else {
          r.lo = p.lo;
          r.lo_closed = p.lo_closed && q.lo_closed;
        }
        if (p.hi < q.hi) {
          r.hi = p.hi;
          r.hi_closed = p.hi_closed;
        } else if (q.hi < p.hi) {
          r.hi = q.hi;
          r.hi_closed = q.hi_closed;
        } else {
          r.hi = p.hi;
          r.hi_closed = p.hi_closed && q.hi_closed;
        }
        z.sides.push_back(r);
      }
      if (!z.empty()) boxes.push_back(std::move(z));
    }
  }
  return simplify(Region(a.dim(), std::move(boxes)));
}

Region complement(const Region& a) {
  auto grid = CellGrid::over({&a}, a.dim());
  std::vector<char> member(grid.count());
  for (std::size_t f = 0; f < grid.count(); ++f) member[f] = a.contains(grid.rep(grid.index(f))) ? 0 : 1;
  return from_cells(a.dim(), grid, member);
}

Region difference(const Region& a, const Region& b) { return intersect(a, complement(b)); }

Region closure(const Region& a) {
  std::vector<Box> boxes;
  for (auto b : a.boxes()) {
    for (auto& s : b.sides) {
      s.lo_closed = s.lo.finite();
      s.hi_closed = s.hi.finite();
    }
    boxes.push_back(std::move(b));
  }
  return simplify(Region(a.dim(), std::move(boxes)));
}

Region interior(const Region& a) {
  auto grid = CellGrid::over({&a}, a.dim());
  std::vector<char> in(grid.count());
  for (std::size_t f = 0; f < grid.count(); ++f) in[f] = a.contains(grid.rep(grid.index(f))) ? 1 : 0;
  std::vector<char> member(grid.count(), 0);
  int d = a.dim();
  for (std::size_t f = 0; f < grid.count(); ++f) {
    if (!in[f]) continue;
    auto idx = grid.index(f);
    // neighbours: offsets -1..1 along axes where the piece is a point
    std::vector<int> point_axes;
    for (int j = 0; j < d; ++j)
      if (grid.pieces()[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]].is_point) point_axes.push_back(j);
    bool ok = true;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < point_axes.size(); ++i) combos *= 3;
    for (std::size_t c = 0; c < combos && ok; ++c) {
      auto nb = idx;
      std::size_t t = c;
      for (int j : point_axes) {
        int off = static_cast<int>(t % 3) - 1;
        t /= 3;
        nb[static_cast<std::size_t>(j)] = static_cast<std::size_t>(static_cast<long>(nb[static_cast<std::size_t>(j)]) + off);
      }
      ok = in[grid.flat(nb)] != 0;
    }
    member[f] = ok ? 1 : 0;
  }
  return from_cells(a.dim(), grid, member);
}

bool subset(const Region& a, const Region& b) {
  require_same_dim(a, b);
  if (a.empty()) return true;
  auto grid = CellGrid::over({&a, &b}, a.dim());
  for (std::size_t f = 0; f < grid.count(); ++f) {
    auto p = grid.rep(grid.index(f));
    if (a.contains(p) && !b.contains(p)) return false;
  }
  return true;
}

bool same_set(const Region& a, const Region& b) { return subset(a, b) && subset(b, a); }

Region disjoint_boxes(const Region& a) {
  auto grid = CellGrid::over({&a}, a.dim());
  std::vector<char> member(grid.count());
  for (std::size_t f = 0; f < grid.count(); ++f) member[f] = a.contains(grid.rep(grid.index(f))) ? 1 : 0;
  // merging two disjoint cells that differ in one side keeps the list disjoint
  return from_cells(a.dim(), grid, member);
}

std::optional<RPoint> any_point(const Region& a) {
  if (a.empty()) return std::nullopt;
  auto grid = CellGrid::over({&a}, a.dim());
  for (std::size_t f = 0; f < grid.count(); ++f) {
    auto p = grid.rep(grid.index(f));
    if (a.contains(p)) return p;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dilation algebra

Region w_eps(const Rational& eps, int d) {
  if (eps <= 0) fail(ErrorCode::InvalidArgument, "W_eps requires eps > 0");
  Region axis(1, {Box({Interval::make(XReal::neg_inf(), false, Rational(-eps), true)}),
                  Box({Interval::make(eps, true, XReal::pos_inf(), false)})});
  return cartesian(std::vector<Region>(static_cast<std::size_t>(d), axis));
}

namespace {

XReal inverse(const XReal& x, int side_sign) {
  if (!x.finite()) return XReal(0);
  if (x.value() == 0) return side_sign > 0 ? XReal::pos_inf() : XReal::neg_inf();
  return XReal(Rational(1 / x.value()));
}

Interval reciprocal_interval(const Interval& iv) {
  if (iv.contains_zero() || (iv.lo.sign() < 0 && iv.hi.sign() > 0))
    fail(ErrorCode::ContainsZero, "reciprocal of interval " + iv.str() + " containing 0");
  int side = iv.hi.sign() > 0 ? 1 : -1;
  return Interval::make(inverse(iv.hi, side), iv.hi_closed, inverse(iv.lo, side), iv.lo_closed);
}

struct SignParts {
  std::optional<Interval> neg, zero, pos;
};

SignParts split_signs(const Interval& iv) {
  SignParts p;
  Interval n = iv;
  if (XReal(0) < n.hi || (n.hi == XReal(0))) {
    n.hi = XReal(0);
    n.hi_closed = false;
  }
  if (!n.empty()) p.neg = n;
  if (iv.contains_zero()) p.zero = Interval::point(Rational(0));
  Interval q = iv;
  if (q.lo < XReal(0) || q.lo == XReal(0)) {
    q.lo = XReal(0);
    q.lo_closed = false;
  }
  if (!q.empty()) p.pos = q;
  return p;
}

// Product of two intervals of fixed, nonzero signs.
Interval signed_product(const Interval& a, int sa, const Interval& b, int sb) {
  if (sa > 0 && sb > 0)
    return Interval::make(a.lo * b.lo, a.lo_closed && b.lo_closed, a.hi * b.hi, a.hi_closed && b.hi_closed);
  if (sa < 0 && sb < 0)
    return Interval::make(a.hi * b.hi, a.hi_closed && b.hi_closed, a.lo * b.lo, a.lo_closed && b.lo_closed);
  if (sa > 0 && sb < 0)
    return Interval::make(a.hi * b.lo, a.hi_closed && b.lo_closed, a.lo * b.hi, a.lo_closed && b.hi_closed);
  return signed_product(b, sb, a, sa);
}

std::vector<Interval> interval_product(const Interval& a, const Interval& b) {
  std::vector<Interval> out;
  auto pa = split_signs(a);
  auto pb = split_signs(b);
  bool a_any = !a.empty(), b_any = !b.empty();
  if (!a_any || !b_any) return out;
  if (pa.zero || pb.zero) out.push_back(Interval::point(Rational(0)));
  const std::pair<const std::optional<Interval>*, int> sa[] = {{&pa.neg, -1}, {&pa.pos, 1}};
  const std::pair<const std::optional<Interval>*, int> sb[] = {{&pb.neg, -1}, {&pb.pos, 1}};
  for (const auto& [x, sx] : sa) {
    if (!*x) continue;
    for (const auto& [y, sy] : sb) {
      if (!*y) continue;
      out.push_back(signed_product(**x, sx, **y, sy));
    }
  }
  return canonical_1d(std::move(out));
}

}  // namespace

Region reciprocal(const Region& a) {
  std::vector<Box> boxes;
  for (const auto& b : a.boxes()) {
    Box r;
    for (const auto& s : b.sides) r.sides.push_back(reciprocal_interval(s));
    boxes.push_back(std::move(r));
  }
  return simplify(Region(a.dim(), std::move(boxes)));
}

Region cartesian(const std::vector<Region>& factors) {
  if (factors.empty()) fail(ErrorCode::InvalidArgument, "empty cartesian product");
  int d = static_cast<int>(factors.size());
  std::vector<Box> boxes{Box{}};
  for (const auto& f : factors) {
    if (f.dim() != 1) fail(ErrorCode::InvalidArgument, "cartesian factors must be one-dimensional");
    std::vector<Box> next;
    for (const auto& partial : boxes) {
      for (const auto& fb : f.boxes()) {
        Box nb = partial;
        nb.sides.push_back(fb.sides[0]);
        next.push_back(std::move(nb));
      }
    }
    boxes = std::move(next);
  }
  return simplify(Region(d, std::move(boxes)));
}

Region product_set(const Region& a, const Region& b) {
  require_same_dim(a, b);
  int d = a.dim();
  std::vector<Box> boxes;
  for (const auto& x : a.boxes()) {
    for (const auto& y : b.boxes()) {
      std::vector<Region> axes;
      for (int j = 0; j < d; ++j) {
        std::vector<Box> ivs;
        for (auto& iv : interval_product(x.sides[static_cast<std::size_t>(j)], y.sides[static_cast<std::size_t>(j)]))
          ivs.push_back(Box({iv}));
        axes.emplace_back(1, std::move(ivs));
      }
      Region c = cartesian(axes);
      boxes.insert(boxes.end(), c.boxes().begin(), c.boxes().end());
    }
  }
  return simplify(Region(d, std::move(boxes)));
}

Region dilate(const Region& r, const RPoint& a) { return product_set(r, Region::from_box(Box::point(a))); }

XReal hyperplane_distance(const Region& r) {
  XReal best = XReal::pos_inf();
  for (const auto& b : r.boxes()) {
    for (const auto& s : b.sides) {
      XReal dist(0);
      if (s.lo.sign() >= 0)
        dist = s.lo;
      else if (s.hi.sign() <= 0)
        dist = XReal(Rational(-s.hi.value()));
      if (dist < best) best = dist;
    }
  }
  return best;
}

Region shrink_to_compact(const Region& open_region, const Rational& fraction) {
  if (fraction <= 0 || fraction >= Rational(1, 2)) fail(ErrorCode::InvalidArgument, "shrink fraction must be in (0, 1/2)");
  Rational clip = 1 / fraction;
  std::vector<Box> boxes;
  for (const auto& b : open_region.boxes()) {
    Box k;
    bool ok = true;
    for (const auto& s : b.sides) {
      Rational lo = s.lo.finite() ? s.lo.value() : Rational(-clip);
      Rational hi = s.hi.finite() ? s.hi.value() : Rational(clip);
      if (!s.lo.finite() && s.hi.finite() && hi <= lo) lo = hi - clip;
      if (!s.hi.finite() && s.lo.finite() && hi <= lo) hi = lo + clip;
      Rational w = hi - lo;
      if (w <= 0) {
        ok = false;
        break;
      }
      Rational m = fraction * w;
      Rational a = s.lo.finite() ? Rational(lo + m) : lo;
      Rational c = s.hi.finite() ? Rational(hi - m) : hi;
      if (a > c) {
        ok = false;
        break;
      }
      k.sides.push_back(Interval::closed(a, c));
    }
    if (ok) boxes.push_back(std::move(k));
  }
  return simplify(Region(open_region.dim(), std::move(boxes)));
}

Region project(const Region& r, int axis) {
  std::vector<Box> boxes;
  for (const auto& b : r.boxes()) boxes.push_back(Box({b.sides[static_cast<std::size_t>(axis)]}));
  return simplify(Region(1, std::move(boxes)));
}

bool is_product_region(const Region& r) {
  if (r.dim() == 1 || r.empty()) return true;
  std::vector<Region> proj;
  for (int j = 0; j < r.dim(); ++j) proj.push_back(project(r, j));
  return subset(cartesian(proj), r);
}

// ---------------------------------------------------------------------------
// Zero-pattern strata

bool StratifiedSet::is_punctured_space() const {
  unsigned all = (1u << dim) - 1;
  return patterns.size() == (1u << dim) - 1 && !contains_pattern(all);
}

bool StratifiedSet::contains(const Point& y) const {
  unsigned z = 0;
  for (int j = 0; j < y.dim; ++j)
    if (y[j] == 0.0) z |= 1u << j;
  return contains_pattern(z);
}

std::vector<std::string> StratifiedSet::pattern_strings() const {
  std::vector<std::string> out;
  for (unsigned z : patterns) {
    std::string s = "{";
    bool first = true;
    for (int j = 0; j < dim; ++j)
      if (z & (1u << j)) {
        s += (first ? "" : ",") + std::to_string(j + 1);
        first = false;
      }
    out.push_back(s + "}");
  }
  return out;
}

std::string StratifiedSet::str() const {
  if (is_full_space()) return "R^d (all patterns)";
  if (is_nonzero_orthant_union()) return "(R\\0)^d (empty pattern only)";
  std::string s = is_punctured_space() ? "R^d\\{0} " : "";
  s += "patterns {";
  auto ps = pattern_strings();
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? "," : "") + ps[i];
  return s + "}";
}

StratifiedSet omega_tilde(const Region& omega) {
  if (omega.empty()) fail(ErrorCode::EmptyRegion, "omega_tilde of an empty region");
  if (!omega.is_open()) fail(ErrorCode::InvalidArgument, "omega_tilde requires an open region");
  StratifiedSet s;
  s.dim = omega.dim();
  for (const auto& b : omega.boxes()) {
    // coordinates that can be zero or not, and those pinned to zero
    unsigned free = 0, forced = 0;
    for (int j = 0; j < s.dim; ++j) {
      const auto& side = b.sides[static_cast<std::size_t>(j)];
      if (!side.contains_zero()) continue;
      if (side.is_point()) forced |= 1u << j;
      else free |= 1u << j;
    }
    for (unsigned z = free;; z = (z - 1) & free) {
      s.patterns.insert(z | forced);
      if (z == 0) break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// V_*

VStarResult v_star(const Region& m, const Region& n) {
  require_same_dim(m, n);
  int d = m.dim();
  VStarResult res;
  std::vector<std::vector<Piece>> pieces;
  for (int j = 0; j < d; ++j) {
    std::vector<Rational> events{Rational(0)};
    std::vector<Rational> me, ne;
    add_breaks(m, j, me);
    add_breaks(n, j, ne);
    for (const auto& a : me) {
      if (a == 0) continue;
      for (const auto& b : ne) events.push_back(b / a);
    }
    auto ps = axis_pieces(std::move(events));
    ps.erase(std::remove_if(ps.begin(), ps.end(), [](const Piece& p) { return p.is_point && p.rep == 0; }), ps.end());
    pieces.push_back(std::move(ps));
  }
  // The arrangement of eta*M against N along each axis only changes at the
  // event ratios, so one representative per cell decides the whole cell.
  CellGrid grid(d, std::move(pieces));
  std::vector<char> member(grid.count());
  for (std::size_t f = 0; f < grid.count(); ++f) {
    auto eta = grid.rep(grid.index(f));
    member[f] = subset(dilate(m, eta), n) ? 1 : 0;
  }
  res.set = from_cells(d, grid, member);
  res.unknown_band = Region(d);
  return res;
}

DualityReport duality_check(const Region& m, const Region& n) {
  DualityReport r;
  r.lhs = v_star(complement(m), complement(n)).set;
  r.rhs = reciprocal(v_star(n, m).set);
  r.lhs_minus_rhs = difference(r.lhs, r.rhs);
  r.rhs_minus_lhs = difference(r.rhs, r.lhs);
  r.equal = r.lhs_minus_rhs.empty() && r.rhs_minus_lhs.empty();
  return r;
}

}  // namespace hadamard
