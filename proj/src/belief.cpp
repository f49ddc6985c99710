#include "mcsr/belief.hpp"

#include <algorithm>

namespace mcsr {

BeliefSet::BeliefSet(std::set<Atom> atoms, UnionFind eq) : eq_(std::move(eq)) {
  for (const Atom& a : atoms) atoms_.insert(a.canonical(eq_));
}

void BeliefSet::insert(const Atom& ground_atom) {
  atoms_.insert(ground_atom.canonical(eq_));
}

bool BeliefSet::contains(const Atom& ground_atom) const {
  return atoms_.count(ground_atom.canonical(eq_)) != 0;
}

int BeliefSet::count_role_fillers(Symbol role, Symbol subject) const {
  Symbol subj = eq_.find(subject);
  std::set<Symbol> fillers;
  for (const Atom& a : atoms_) {
    if (a.pred() != role || a.arity() != 2) continue;
    if (a.args()[0].sym() != subj) continue;
    fillers.insert(a.args()[1].sym());  // already canonical
  }
  return static_cast<int>(fillers.size());
}

std::vector<std::string> BeliefSet::render_lines() const {
  std::vector<std::string> lines;
  lines.reserve(atoms_.size());
  for (const Atom& a : atoms_) lines.push_back(a.render());
  std::sort(lines.begin(), lines.end());
  for (const auto& cls : eq_.nontrivial_classes()) {
    for (size_t i = 1; i < cls.size(); ++i) {
      lines.push_back(std::string(cls[i].str()) + " = " +
                      std::string(cls[0].str()));
    }
  }
  return lines;
}

bool BeliefSet::subset_of(const BeliefSet& o) const {
  for (const Atom& a : atoms_)
    if (!o.contains(a)) return false;
  for (const auto& cls : eq_.nontrivial_classes())
    for (size_t i = 1; i < cls.size(); ++i)
      if (!o.eq().same(cls[0], cls[i])) return false;
  return true;
}

bool states_equal(const BeliefState& a, const BeliefState& b) {
  return a == b;
}

}  // namespace mcsr
