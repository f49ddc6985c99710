#ifndef MCSR_ONTOLOGY_HPP
#define MCSR_ONTOLOGY_HPP

#include <set>
#include <string>
#include <vector>

#include "mcsr/aic.hpp"
#include "mcsr/deductive.hpp"

namespace mcsr {

// A problem instance: the system plus its active integrity constraints.
struct Problem {
  Mcs mcs;
  std::vector<Aic> aics;
};

// Supported T-Box axiom shapes. The right-hand side is either an atomic
// concept or an unqualified existential, which is materialized as the
// derived concept exists_<role>.
struct TBoxAxiom {
  enum class Lhs { Atomic, Conjunction, Exists, ExistsInv };

  Lhs lhs = Lhs::Atomic;
  Symbol c1;    // Atomic / Conjunction (first conjunct) / qualifier of
                // Exists and ExistsInv
  Symbol c2;    // Conjunction: second conjunct
  Symbol role;  // Exists / ExistsInv
  bool rhs_exists = false;
  Symbol rhs_concept;  // when !rhs_exists
  Symbol rhs_role;     // when rhs_exists

  static TBoxAxiom atomic(Symbol c, Symbol d);
  static TBoxAxiom conjunction(Symbol c1, Symbol c2, Symbol d);
  static TBoxAxiom exists(Symbol role, Symbol qualifier, Symbol d);
  static TBoxAxiom exists_inv(Symbol role, Symbol qualifier, Symbol d);
  static TBoxAxiom exists_inv_to_exists(Symbol role, Symbol qualifier,
                                        Symbol rhs_role);

  std::string render() const;
};

// Derived-concept name for the unqualified existential of a role.
Symbol exists_concept(Symbol role);

// Compiles one axiom into Horn rules over concept/role atoms. The
// canonical derivation exists_R(X) <- R(X, Y) is emitted once per role by
// encode_ontology, not here.
std::vector<HornRule> compile_tbox_axiom(const TBoxAxiom& a);

struct OntologyFixture {
  std::vector<TBoxAxiom> tbox;
  std::set<Atom> abox;  // atomic concept/role instances only
  std::vector<std::pair<Symbol, Symbol>> equal;
  std::vector<std::pair<Symbol, Symbol>> distinct;
  std::set<Symbol> ops;  // update operations enabled on the A-Box context
  std::vector<Aic> aics;  // context 0 = T, context 1 = A
};

// Two-context encoding: context "T" holds the compiled T-Box and no
// update operations; context "A" holds the fact store. Bridge rules port
// every atomic concept/role instance and every individual equality from A
// to T. Throws std::invalid_argument for malformed fixtures.
Mcs encode_ontology(const OntologyFixture& f);
Problem encode_ontology_problem(const OntologyFixture& f);

// Database AIC in the classical form: atoms over one signature, head
// actions +a (insert) or -a (delete) drawn from the body.
struct DatabaseAic {
  std::string name;
  std::vector<LiteralCore> body;  // atom literals only
  std::vector<std::pair<bool, Atom>> head;  // (insert?, atom)
};

// Single-context encoding of a database: one deductive context "DB" with
// operations add and del.
Mcs encode_database(const std::set<Atom>& facts);
// Literal-by-literal translation onto context 0 of encode_database's
// output: -a becomes del(a), +a becomes add(a).
Aic translate_database_aic(const DatabaseAic& r);

}  // namespace mcsr

#endif
