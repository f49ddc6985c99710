#ifndef MCSR_VALIDITY_HPP
#define MCSR_VALIDITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "mcsr/aic.hpp"

namespace mcsr {

// Atom of the variant-enumeration universe, qualified by context.
struct UniverseAtom {
  int ctx = 0;
  Atom atom;
  bool operator<(const UniverseAtom& o) const {
    if (ctx != o.ctx) return ctx < o.ctx;
    return AtomNameLess{}(atom, o.atom);
  }
};

enum class ValidityVerdict {
  Valid,
  CounterexampleCondition1,
  CounterexampleCondition2,
  Inconclusive,
};

struct InstanceValidity {
  std::string label;  // ground instance label
  ValidityVerdict verdict = ValidityVerdict::Valid;
  // condition 1 counterexample: a violating variant no head subset repairs
  std::optional<std::string> unrepairable_variant;
  // condition 2 counterexample: a head action repairing no violating variant
  std::optional<std::string> useless_action;
  // per head action: the witnessing variant (condition 2), when found
  std::vector<std::pair<std::string, std::string>> witnesses;
};

struct ValidityReport {
  ValidityVerdict verdict = ValidityVerdict::Valid;
  bool exhaustive = false;  // bound covered the whole universe
  std::vector<InstanceValidity> instances;
};

// Bounded check of AIC validity over the variants reachable by update
// sets of size <= bound over the atom universe:
//   condition 1 - every enumerated logically consistent violating variant
//     is repaired by some subset of the head;
//   condition 2 - every head action repairs some enumerated violating
//     variant.
// A missing condition-2 witness is a counterexample when the enumeration
// is exhaustive for the universe (bound >= universe size), and
// inconclusive otherwise.
ValidityReport bounded_validity_check(const Mcs& m, const Aic& r,
                                      const std::vector<UniverseAtom>& universe,
                                      int bound);

// Default universe: every ground atom over the active domain whose
// predicate is associated with a context that can add or delete facts.
std::vector<UniverseAtom> default_validity_universe(
    const Mcs& m, const std::vector<Aic>& aics);

std::string verdict_name(ValidityVerdict v);

}  // namespace mcsr

#endif
