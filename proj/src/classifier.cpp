#include "hadamard/classifier.hpp"

#include <sstream>

namespace hadamard {

namespace {

void require_domain(const Region& omega) {
  if (omega.empty()) fail(ErrorCode::EmptyRegion, "domain is empty");
  if (!omega.is_open()) fail(ErrorCode::InvalidArgument, "domain " + omega.str() + " is not open");
}

// closure of 1/supp T, compact once the clearance is positive
Region dilation_factors(const DistributionRep& t) {
  if (!(hyperplane_clearance(t) > 0.0))
    fail(ErrorCode::SupportTouchesHyperplane, "support " + support_of(t).str() + " meets a coordinate hyperplane");
  return reciprocal(support_of(t));
}

// Points with some coordinate exactly zero.
Region hyperplanes(int d) {
  std::vector<Box> boxes;
  for (int j = 0; j < d; ++j) {
    std::vector<Interval> sides(static_cast<std::size_t>(d), Interval::line());
    sides[static_cast<std::size_t>(j)] = Interval::point(0);
    boxes.emplace_back(sides);
  }
  return Region(d, boxes);
}

// Omega = prod (-r_j, r_j)
bool centered_box(const Region& omega) {
  if (omega.boxes().size() != 1) return false;
  for (const auto& s : omega.boxes()[0].sides) {
    if (!s.lo.finite() || !s.hi.finite() || s.lo_closed || s.hi_closed) return false;
    if (s.lo.value() != -s.hi.value()) return false;
  }
  return true;
}

SupportCheck check_one(const Region& factors, const Region& omega, const Region& k) {
  SupportCheck c;
  c.image = closure(product_set(factors, k));
  Region out = difference(c.image, omega);
  if (out.empty()) {
    c.outcome = SupportOutcome::Holds;
    return c;
  }
  c.outcome = SupportOutcome::Fails;
  c.witness = k;
  c.escaping = any_point(out);
  std::ostringstream os;
  os << "closure((1/supp T) K) = " << c.image.str() << " is not inside " << omega.str() << " for K = " << k.str();
  if (c.escaping) os << "; escaping point " << format_point(*c.escaping);
  c.detail = os.str();
  return c;
}

}  // namespace

std::string format_point(const RPoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + format_rational(p[i]);
  return s + ")";
}

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::ContainsZero: return "ContainsZero";
    case DomainKind::SubsetNZ: return "SubsetNZ";
    case DomainKind::Mixed: return "Mixed";
  }
  return "?";
}

const char* to_string(SupportOutcome o) {
  switch (o) {
    case SupportOutcome::Holds: return "Holds";
    case SupportOutcome::Fails: return "Fails";
    case SupportOutcome::Unknown: return "Unknown";
  }
  return "?";
}

const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Admissible: return "Admissible";
    case VerdictKind::NotAdmissible: return "NotAdmissible";
    case VerdictKind::NecessaryConditionsHold: return "NecessaryConditionsHold";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

const char* to_string(Rule r) {
  switch (r) {
    case Rule::ZeroInDomain: return "zero-in-domain";
    case Rule::SubsetNonzero: return "subset-nonzero";
    case Rule::LinfBall: return "linf-ball";
    case Rule::EulerOnly: return "euler-only";
    case Rule::Necessity: return "necessity";
    case Rule::PuncturedSpace: return "punctured-space";
    case Rule::MixedDomain: return "mixed-domain";
  }
  return "?";
}

DomainCase domain_case(const Region& omega) {
  require_domain(omega);
  DomainCase c;
  c.patterns = omega_tilde(omega);
  if (omega.contains(RPoint(static_cast<std::size_t>(omega.dim()), Rational(0))))
    c.kind = DomainKind::ContainsZero;
  else if (c.patterns.is_nonzero_orthant_union())
    c.kind = DomainKind::SubsetNZ;
  else
    c.kind = DomainKind::Mixed;
  return c;
}

SupportCheck support_condition(const DistributionRep& t, const Region& omega, const Region& k) {
  require_domain(omega);
  if (k.dim() != omega.dim() || t.dim() != omega.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  if (k.empty() || !k.is_bounded() || !same_set(closure(k), k) || !subset(k, omega))
    fail(ErrorCode::InvalidArgument, "K = " + k.str() + " is not a compact subset of " + omega.str());
  auto c = check_one(dilation_factors(t), omega, k);
  c.levels_checked = 1;
  if (c.outcome == SupportOutcome::Holds) c.detail = "closure((1/supp T) K) = " + c.image.str() + " lies inside the domain";
  return c;
}

SupportCheck support_condition(const DistributionRep& t, const Region& omega, int levels) {
  require_domain(omega);
  if (t.dim() != omega.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
  Region factors = dilation_factors(t);
  SupportCheck last;
  for (int k = 1; k <= levels; ++k) {
    Rational frac(1, 1);
    for (int i = 0; i <= k; ++i) frac /= 2;  // 2^-(k+1), below the 1/2 limit
    Region kk = shrink_to_compact(omega, frac);
    if (kk.empty()) continue;
    auto c = check_one(factors, omega, kk);
    c.levels_checked = k;
    if (c.outcome == SupportOutcome::Fails) return c;
    last = c;
  }
  SupportCheck res;
  res.levels_checked = levels;
  try {
    Region whole = product_set(closure(factors), omega);
    Region out = difference(whole, omega);
    if (out.empty()) {
      res.outcome = SupportOutcome::Holds;
      res.exact = true;
      res.image = last.image;
      res.detail = "closure(1/supp T) * Omega = " + whole.str() + " lies inside the domain";
      return res;
    }
    // the exact criterion fails: go deeper for a concrete compact witness
    for (int k = levels + 1; k <= 4 * levels + 40; ++k) {
      Rational frac(1, 1);
      for (int i = 0; i <= k; ++i) frac /= 2;
      Region kk = shrink_to_compact(omega, frac);
      if (kk.empty()) continue;
      auto c = check_one(factors, omega, kk);
      c.levels_checked = k;
      if (c.outcome == SupportOutcome::Fails) return c;
    }
    res.outcome = SupportOutcome::Unknown;
    res.detail = "closure(1/supp T) * Omega leaves the domain at " + (any_point(out) ? format_point(*any_point(out)) : "?") +
                 " but no compact witness was found";
    return res;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IndeterminateProduct) throw;
    res.outcome = SupportOutcome::Unknown;
    res.detail = std::string("dyadic family passed ") + std::to_string(levels) +
                 " levels; exact criterion undecided (" + e.what() + ")";
    return res;
  }
}

Verdict admissible(const DistributionRep& t, const Region& omega) {
  Verdict v;
  try {
    v.domain = domain_case(omega);
    if (t.dim() != omega.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch");
    Region supp = support_of(t);
    double clearance = hyperplane_clearance(t);
    std::ostringstream diag;
    diag << "domain " << to_string(v.domain.kind) << " (" << v.domain.patterns.str() << "), supp T = " << supp.str()
         << ", clearance " << clearance;

    auto reject = [&](Rule rule, const std::string& reason, const std::string& witness) {
      v.kind = VerdictKind::NotAdmissible;
      v.rule = rule;
      v.reason = reason;
      v.witness = witness;
      v.diagnostic = diag.str();
      return v;
    };
    auto unknown = [&](Rule rule, const std::string& reason) {
      v.kind = VerdictKind::Unknown;
      v.rule = rule;
      v.reason = reason;
      v.diagnostic = diag.str();
      return v;
    };

    if (!(clearance > 0.0)) {
      Region on = intersect(closure(supp), hyperplanes(t.dim()));
      auto p = any_point(on);
      return reject(Rule::Necessity, "support meets a coordinate hyperplane",
                    "supp T contains " + (p ? format_point(*p) : std::string("a point")) + " with a zero coordinate");
    }

    auto sc = support_condition(t, omega);
    v.support = sc;
    // with compact support in a nonzero domain the V_* test below is exact and gives the sharper witness
    bool vstar_first = v.domain.kind == DomainKind::SubsetNZ && supp.is_bounded();
    if (sc.outcome == SupportOutcome::Fails && !vstar_first)
      return reject(Rule::Necessity, "support condition fails", sc.detail);

    switch (v.domain.kind) {
      case DomainKind::ContainsZero: {
        if (is_OH(t) != Membership::Certified) return unknown(Rule::ZeroInDomain, "O'_H membership not certified");
        if (sc.outcome != SupportOutcome::Holds) return unknown(Rule::ZeroInDomain, "support condition undecided: " + sc.detail);
        v.kind = VerdictKind::Admissible;
        v.rule = (centered_box(omega) && clearance >= 1.0) ? Rule::LinfBall : Rule::ZeroInDomain;
        v.reason = v.rule == Rule::LinfBall ? "supp T inside W_1 and the domain is a centered open box"
                                            : "T in D'_H and the support condition holds";
        break;
      }
      case DomainKind::SubsetNZ: {
        if (!supp.is_bounded())
          return reject(Rule::SubsetNonzero, "support is not compact", "supp T = " + supp.str() + " is unbounded");
        auto vs = v_star(omega, omega);
        if (!vs.exact) return unknown(Rule::SubsetNonzero, "V_*(Omega) is only approximate");
        Region inv = reciprocal(supp);
        Region bad = difference(inv, vs.set);
        bool unit = same_set(vs.set, Region::point(Point::ones(omega.dim())));
        if (!bad.empty()) {
          auto p = any_point(bad);
          return reject(unit ? Rule::EulerOnly : Rule::SubsetNonzero, "1/supp T is not inside V_*(Omega)",
                        "1/supp T contains " + (p ? format_point(*p) : std::string("a point")) +
                            " outside V_*(Omega) = " + vs.set.str());
        }
        if (sc.outcome == SupportOutcome::Fails) return reject(Rule::Necessity, "support condition fails", sc.detail);
        v.kind = VerdictKind::Admissible;
        v.rule = unit ? Rule::EulerOnly : Rule::SubsetNonzero;
        v.reason = unit ? "V_*(Omega) = {1}: T is supported at the unit point, an Euler operator"
                        : "T compactly supported in the nonzero orthants with 1/supp T inside V_*(Omega) = " +
                              vs.set.str();
        break;
      }
      case DomainKind::Mixed: {
        if (v.domain.patterns.is_punctured_space() && !supp.is_bounded())
          return reject(Rule::PuncturedSpace, "support is not compact", "supp T = " + supp.str() + " is unbounded");
        if (sc.outcome != SupportOutcome::Holds) return unknown(Rule::MixedDomain, "support condition undecided: " + sc.detail);
        v.kind = VerdictKind::NecessaryConditionsHold;
        v.rule = v.domain.patterns.is_punctured_space() ? Rule::PuncturedSpace : Rule::MixedDomain;
        v.reason = "positive clearance and the support condition hold; sufficiency is not established for mixed domains";
        break;
      }
    }
    v.diagnostic = diag.str();
    return v;
  } catch (const Error& e) {
    v.kind = VerdictKind::Unknown;
    v.reason = std::string(to_string(e.code())) + ": " + e.what();
    return v;
  }
}

bool euler_only(const Region& omega) {
  require_domain(omega);
  auto vs = v_star(omega, omega);
  if (!vs.exact) fail(ErrorCode::ApproximateVStar, "V_*(" + omega.str() + ") could not be certified exactly");
  return same_set(vs.set, Region::point(Point::ones(omega.dim())));
}

}  // namespace hadamard
