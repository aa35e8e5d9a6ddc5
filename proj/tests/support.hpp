#pragma once

// Shared generators and brute-force oracles for the test binaries.

#include <algorithm>
#include <random>
#include <vector>

#include "hadamard/region.hpp"

namespace hadamard::testing {

/// Random finite union of 1D intervals with half-integer endpoints in
/// [-4, 4], random flags, occasionally unbounded on one side.
inline Region random_union_1d(std::mt19937_64& rng, int max_pieces = 3) {
  std::uniform_int_distribution<int> count(1, max_pieces), ends(-8, 8), coin(0, 1), rare(0, 5);
  std::vector<Box> boxes;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    int a = ends(rng), b = ends(rng);
    if (a > b) std::swap(a, b);
    XReal lo = Rational(a, 2), hi = Rational(b, 2);
    bool lc = coin(rng), hc = coin(rng);
    if (a == b) lc = hc = true;
    if (rare(rng) == 0) lo = XReal::neg_inf();
    else if (rare(rng) == 0) hi = XReal::pos_inf();
    Interval iv = Interval::make(lo, lc, hi, hc);
    if (!iv.empty()) boxes.push_back(Box({iv}));
  }
  if (boxes.empty()) boxes.push_back(Box({Interval::closed(1, 2)}));
  return simplify(Region(1, std::move(boxes)));
}

/// Random open box union in d dimensions with integer/2 endpoints.
inline Region random_open_region(std::mt19937_64& rng, int d, int max_boxes = 3) {
  std::uniform_int_distribution<int> count(1, max_boxes), ends(-6, 6);
  std::vector<Box> boxes;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Box b;
    for (int j = 0; j < d; ++j) {
      int a = ends(rng), c = ends(rng);
      if (a == c) c = a + 1;
      if (a > c) std::swap(a, c);
      b.sides.push_back(Interval::open(Rational(a, 2), Rational(c, 2)));
    }
    boxes.push_back(std::move(b));
  }
  return Region(d, std::move(boxes));
}

/// Random box union with arbitrary flags (closed, open, points, unbounded).
inline Region random_region(std::mt19937_64& rng, int d, int max_boxes = 3) {
  std::uniform_int_distribution<int> count(1, max_boxes), ends(-4, 4), coin(0, 1), rare(0, 7);
  std::vector<Box> boxes;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Box b;
    for (int j = 0; j < d; ++j) {
      int a = ends(rng), c = ends(rng);
      if (a > c) std::swap(a, c);
      XReal lo = Rational(a, 2), hi = Rational(c, 2);
      bool lc = coin(rng), hc = coin(rng);
      if (a == c) lc = hc = true;
      if (rare(rng) == 0) lo = XReal::neg_inf();
      if (rare(rng) == 0) hi = XReal::pos_inf();
      b.sides.push_back(Interval::make(lo, lc, hi, hc));
    }
    if (!b.empty()) boxes.push_back(std::move(b));
  }
  return Region(d, std::move(boxes));
}

/// Sorted finite endpoints of a 1D region.
inline std::vector<Rational> endpoints_1d(const Region& r) {
  std::vector<Rational> e;
  for (const auto& b : r.boxes()) {
    if (b.sides[0].lo.finite()) e.push_back(b.sides[0].lo.value());
    if (b.sides[0].hi.finite()) e.push_back(b.sides[0].hi.value());
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

/// Critical points plus midpoints and outer points: every piece of the
/// arrangement generated by these points gets a sample.
inline std::vector<Rational> probe_grid(std::vector<Rational> pts) {
  pts.push_back(Rational(0));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Rational> g;
  g.push_back(pts.front() - 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    g.push_back(pts[i]);
    if (i + 1 < pts.size()) g.push_back((pts[i] + pts[i + 1]) / 2);
  }
  g.push_back(pts.back() + 1);
  return g;
}

/// Brute-force test of eta*M subset N in 1D by sampling M on the grid of all
/// critical points (endpoints of M and of N/eta) and their midpoints.
inline bool brute_dilation_subset(const Region& m, const Region& n, const Rational& eta) {
  std::vector<Rational> crit = endpoints_1d(m);
  for (const auto& b : endpoints_1d(n)) crit.push_back(b / eta);
  for (const auto& x : probe_grid(crit)) {
    if (!m.contains(RPoint{x})) continue;
    if (!n.contains(RPoint{Rational(eta * x)})) return false;
  }
  return true;
}

}  // namespace hadamard::testing
