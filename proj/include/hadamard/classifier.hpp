#pragma once

// Admissibility of (T, Omega): the case split on whether Omega contains the
// origin, avoids the coordinate hyperplanes, or is mixed, and the support
// condition (1/supp T) K compactly inside Omega for all compact K.

#include <optional>
#include <string>

#include "hadamard/distribution.hpp"
#include "hadamard/region.hpp"

namespace hadamard {

enum class DomainKind { ContainsZero, SubsetNZ, Mixed };
const char* to_string(DomainKind k);

struct DomainCase {
  DomainKind kind = DomainKind::Mixed;
  StratifiedSet patterns;
};

/// Throws EmptyRegion for an empty domain, InvalidArgument if it is not open.
DomainCase domain_case(const Region& omega);

enum class SupportOutcome { Holds, Fails, Unknown };
const char* to_string(SupportOutcome o);

struct SupportCheck {
  SupportOutcome outcome = SupportOutcome::Unknown;
  bool exact = false;              // Holds certified by the exact criterion
  std::optional<Region> witness;   // compact K with closure((1/supp T) K) not inside Omega
  std::optional<RPoint> escaping;  // a point of that closure outside Omega
  Region image;                    // closure((1/supp T) K) for the witness
  int levels_checked = 0;
  std::string detail;
};

/// Dyadic compact exhaustion K_k = shrink(Omega, 2^-k), k = 1..levels,
/// followed by the exact criterion closure(1/supp T) * Omega inside Omega,
/// which is equivalent because closure(1/supp T) is compact.
/// Throws SupportTouchesHyperplane when the clearance of T is 0.
SupportCheck support_condition(const DistributionRep& t, const Region& omega, int levels = 10);

/// The condition for one given compact K inside Omega.
SupportCheck support_condition(const DistributionRep& t, const Region& omega, const Region& k);

enum class VerdictKind { Admissible, NotAdmissible, NecessaryConditionsHold, Unknown };
const char* to_string(VerdictKind v);

enum class Rule { ZeroInDomain, SubsetNonzero, LinfBall, EulerOnly, Necessity, PuncturedSpace, MixedDomain };
const char* to_string(Rule r);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  Rule rule = Rule::Necessity;
  DomainCase domain;
  std::string reason;
  /// Human-readable witness for NotAdmissible: the failing K and point, the
  /// support point on a hyperplane, or the unbounded support.
  std::string witness;
  std::optional<SupportCheck> support;
  std::string diagnostic;
};

/// Never throws for well-formed input; problems become Unknown verdicts.
Verdict admissible(const DistributionRep& t, const Region& omega);

/// True iff V_*(Omega) = {1}. Throws ApproximateVStar if V_* is not exact.
bool euler_only(const Region& omega);

std::string format_point(const RPoint& p);

}  // namespace hadamard
