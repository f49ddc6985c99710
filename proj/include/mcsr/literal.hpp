#ifndef MCSR_LITERAL_HPP
#define MCSR_LITERAL_HPP

#include <map>
#include <string>
#include <vector>

#include "mcsr/symbols.hpp"

namespace mcsr {

// Variable binding environment used by grounding and rule evaluation.
using Bindings = std::map<Symbol, Symbol>;  // variable -> constant

Term substitute(const Term& t, const Bindings& b);
Atom substitute(const Atom& a, const Bindings& b);

// Matches a (possibly non-ground) atom pattern against a canonical ground
// fact, extending the bindings. Newly bound variables are pushed on the
// trail; on failure the bindings are restored to the trail mark.
bool match_atom(const Atom& pattern, const Atom& fact, const UnionFind& eq,
                Bindings& b, std::vector<Symbol>& trail);

// One body element of a rule, bridge rule or AIC, without the context
// qualifier: an atom, an equality between terms, or a cardinality test
// "at most k distinct fillers y with role(subject, y)". Any of them may
// be negated.
struct LiteralCore {
  enum class Kind { Atom, Equality, AtMost };

  Kind kind = Kind::Atom;
  bool negated = false;
  Atom atom;            // Kind::Atom
  Term lhs, rhs;        // Kind::Equality
  int bound = 0;        // Kind::AtMost
  Symbol role;          // Kind::AtMost
  Term subject;         // Kind::AtMost

  static LiteralCore positive(Atom a);
  static LiteralCore negative(Atom a);
  static LiteralCore equality(Term l, Term r, bool negated = false);
  static LiteralCore at_most(int k, Symbol role, Term subject,
                             bool negated = false);

  bool ground() const;
  LiteralCore substituted(const Bindings& b) const;
  void collect_vars(std::vector<Symbol>& out) const;
  // Variables that this literal can bind during grounding (only when
  // positive): atom arguments, equality operands, the at-most subject.
  void collect_binding_vars(std::vector<Symbol>& out) const;
  void collect_consts(std::vector<Symbol>& out) const;

  std::string render() const;

  bool operator==(const LiteralCore& o) const;
  bool operator<(const LiteralCore& o) const;
};

// Argument of a management operation. The shape is fixed per operation:
// add/del/webEnroll take an atom, assertEqual an equality, redistribute a
// negated atom, unregister a negated inverse-role existential.
struct OpArg {
  enum class Kind { Atom, NegAtom, Equality, NegExistsInv };

  Kind kind = Kind::Atom;
  Atom atom;      // Atom / NegAtom
  Term lhs, rhs;  // Equality (normalized: lhs <= rhs by name when ground)
  Symbol role;    // NegExistsInv
  Term subject;   // NegExistsInv

  static OpArg make_atom(Atom a);
  static OpArg make_neg_atom(Atom a);
  static OpArg make_equality(Term l, Term r);
  static OpArg make_neg_exists_inv(Symbol role, Term subject);

  bool ground() const;
  OpArg substituted(const Bindings& b) const;
  void collect_vars(std::vector<Symbol>& out) const;
  void collect_consts(std::vector<Symbol>& out) const;

  std::string render() const;

  bool operator==(const OpArg& o) const;
  bool operator<(const OpArg& o) const;
};

}  // namespace mcsr

#endif
