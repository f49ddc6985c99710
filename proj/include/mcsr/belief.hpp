#ifndef MCSR_BELIEF_HPP
#define MCSR_BELIEF_HPP

#include <set>
#include <string>
#include <vector>

#include "mcsr/symbols.hpp"

namespace mcsr {

// A belief set: finite set of ground atoms plus an equality relation over
// individuals. Atoms are stored canonicalized (every constant replaced by
// its class representative); membership queries canonicalize first.
class BeliefSet {
 public:
  BeliefSet() = default;
  BeliefSet(std::set<Atom> atoms, UnionFind eq);

  const std::set<Atom>& atoms() const { return atoms_; }
  const UnionFind& eq() const { return eq_; }

  void insert(const Atom& ground_atom);
  bool contains(const Atom& ground_atom) const;
  bool equal(Symbol a, Symbol b) const { return eq_.same(a, b); }
  // Number of distinct equality classes y such that role(subject, y) holds.
  int count_role_fillers(Symbol role, Symbol subject) const;

  bool empty() const { return atoms_.empty() && eq_.trivial(); }
  size_t size() const { return atoms_.size(); }

  // Atoms rendered and sorted lexicographically, then nontrivial equality
  // classes rendered as "a = b" pairs against the representative.
  std::vector<std::string> render_lines() const;

  bool operator==(const BeliefSet& o) const {
    return atoms_ == o.atoms_ && eq_ == o.eq_;
  }
  bool operator!=(const BeliefSet& o) const { return !(*this == o); }
  // a subset of o, both atom-wise and equality-wise
  bool subset_of(const BeliefSet& o) const;

 private:
  std::set<Atom> atoms_;
  UnionFind eq_;
};

// One belief set per context.
using BeliefState = std::vector<BeliefSet>;

bool states_equal(const BeliefState& a, const BeliefState& b);

}  // namespace mcsr

#endif
