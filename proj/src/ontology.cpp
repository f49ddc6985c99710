#include "mcsr/ontology.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mcsr {

namespace {

Term var(const char* name) { return Term::variable(Symbol::intern(name)); }

Atom concept_atom(Symbol c, Term t) { return Atom(c, {t}); }
Atom role_atom(Symbol r, Term s, Term t) { return Atom(r, {s, t}); }

}  // namespace

TBoxAxiom TBoxAxiom::atomic(Symbol c, Symbol d) {
  TBoxAxiom a;
  a.lhs = Lhs::Atomic;
  a.c1 = c;
  a.rhs_concept = d;
  return a;
}

TBoxAxiom TBoxAxiom::conjunction(Symbol c1, Symbol c2, Symbol d) {
  TBoxAxiom a;
  a.lhs = Lhs::Conjunction;
  a.c1 = c1;
  a.c2 = c2;
  a.rhs_concept = d;
  return a;
}

TBoxAxiom TBoxAxiom::exists(Symbol role, Symbol qualifier, Symbol d) {
  TBoxAxiom a;
  a.lhs = Lhs::Exists;
  a.role = role;
  a.c1 = qualifier;
  a.rhs_concept = d;
  return a;
}

TBoxAxiom TBoxAxiom::exists_inv(Symbol role, Symbol qualifier, Symbol d) {
  TBoxAxiom a;
  a.lhs = Lhs::ExistsInv;
  a.role = role;
  a.c1 = qualifier;
  a.rhs_concept = d;
  return a;
}

TBoxAxiom TBoxAxiom::exists_inv_to_exists(Symbol role, Symbol qualifier,
                                          Symbol rhs_role) {
  TBoxAxiom a;
  a.lhs = Lhs::ExistsInv;
  a.role = role;
  a.c1 = qualifier;
  a.rhs_exists = true;
  a.rhs_role = rhs_role;
  return a;
}

std::string TBoxAxiom::render() const {
  std::ostringstream os;
  switch (lhs) {
    case Lhs::Atomic:
      os << c1.str();
      break;
    case Lhs::Conjunction:
      os << c1.str() << " and " << c2.str();
      break;
    case Lhs::Exists:
      os << "exists(" << role.str() << ")." << c1.str();
      break;
    case Lhs::ExistsInv:
      os << "exists(" << role.str() << "^R)." << c1.str();
      break;
  }
  os << " <= ";
  if (rhs_exists)
    os << "exists(" << rhs_role.str() << ")";
  else
    os << rhs_concept.str();
  return os.str();
}

Symbol exists_concept(Symbol role) {
  return Symbol::intern("exists_" + std::string(role.str()));
}

std::vector<HornRule> compile_tbox_axiom(const TBoxAxiom& a) {
  Symbol head_pred = a.rhs_exists ? exists_concept(a.rhs_role) : a.rhs_concept;
  Term x = var("X"), y = var("Y");
  HornRule rule;
  switch (a.lhs) {
    case TBoxAxiom::Lhs::Atomic:
      rule.head = concept_atom(head_pred, x);
      rule.body = {LiteralCore::positive(concept_atom(a.c1, x))};
      break;
    case TBoxAxiom::Lhs::Conjunction:
      rule.head = concept_atom(head_pred, x);
      rule.body = {LiteralCore::positive(concept_atom(a.c1, x)),
                   LiteralCore::positive(concept_atom(a.c2, x))};
      break;
    case TBoxAxiom::Lhs::Exists:
      rule.head = concept_atom(head_pred, x);
      rule.body = {LiteralCore::positive(role_atom(a.role, x, y)),
                   LiteralCore::positive(concept_atom(a.c1, y))};
      break;
    case TBoxAxiom::Lhs::ExistsInv:
      rule.head = concept_atom(head_pred, y);
      rule.body = {LiteralCore::positive(role_atom(a.role, x, y)),
                   LiteralCore::positive(concept_atom(a.c1, x))};
      break;
  }
  return {rule};
}

Mcs encode_ontology(const OntologyFixture& f) {
  // ---- compile the T-Box
  std::vector<HornRule> rules;
  std::set<Symbol> roles;  // roles mentioned by axioms
  for (const TBoxAxiom& a : f.tbox) {
    for (const HornRule& r : compile_tbox_axiom(a)) rules.push_back(r);
    if (a.lhs == TBoxAxiom::Lhs::Exists ||
        a.lhs == TBoxAxiom::Lhs::ExistsInv)
      roles.insert(a.role);
    if (a.rhs_exists) roles.insert(a.rhs_role);
  }
  // canonical derivation of the unqualified existentials
  for (Symbol r : roles) {
    HornRule rule;
    rule.head = concept_atom(exists_concept(r), var("X"));
    rule.body = {LiteralCore::positive(role_atom(r, var("X"), var("Y")))};
    rules.push_back(rule);
  }

  // ---- names to port from A to T, with arities
  std::map<Symbol, size_t> ported;
  auto note = [&](const Atom& a) {
    std::string_view name = a.pred().str();
    if (name.substr(0, 7) == "exists_") return;  // derived, never asserted
    auto [it, inserted] = ported.emplace(a.pred(), a.arity());
    if (!inserted && it->second != a.arity())
      throw std::invalid_argument("arity clash for '" +
                                  std::string(name) + "' in the fixture");
  };
  for (const Atom& a : f.abox) {
    if (a.arity() != 1 && a.arity() != 2)
      throw std::invalid_argument(
          "A-Box instances must be atomic concepts or roles, got " +
          a.render());
    if (a.pred().str().substr(0, 7) == "exists_")
      throw std::invalid_argument(
          "A-Box may not assert the derived concept " + a.render());
    note(a);
  }
  for (const HornRule& r : rules) {
    note(r.head);
    for (const LiteralCore& l : r.body)
      if (l.kind == LiteralCore::Kind::Atom) note(l.atom);
  }
  for (const Aic& aic : f.aics) {
    for (const QueryLiteral& l : aic.body) {
      if (l.core.kind == LiteralCore::Kind::Atom) note(l.core.atom);
      if (l.core.kind == LiteralCore::Kind::AtMost)
        ported.emplace(l.core.role, 2);
    }
    for (const UpdateAction& a : aic.head) {
      if (a.arg.kind == OpArg::Kind::Atom || a.arg.kind == OpArg::Kind::NegAtom)
        note(a.arg.atom);
      if (a.arg.kind == OpArg::Kind::NegExistsInv)
        ported.emplace(a.arg.role, 2);
    }
  }
  // compound operations speak the enrollment vocabulary
  if (f.ops.count(ops::web_enroll()) || f.ops.count(ops::unregister()) ||
      f.ops.count(ops::redistribute())) {
    ported.emplace(Symbol::intern("enrolled"), 2);
    ported.emplace(Symbol::intern("webEnrolled"), 2);
    ported.emplace(Symbol::intern("class"), 1);
  }
  // the derived existential prefix never appears among ported names
  for (const auto& [name, arity] : ported) {
    (void)arity;
    if (name.str().substr(0, 7) == "exists_")
      throw std::invalid_argument("reserved predicate name " +
                                  std::string(name.str()));
  }

  Mcs m;
  ManagedContext t;
  t.name = "T";
  t.logic = DeductiveLogic::instance();
  t.kb = make_kb({}, std::make_shared<const RuleProgram>(std::move(rules)));
  // OP_T is empty: the T-Box is immutable
  ManagedContext a;
  a.name = "A";
  a.logic = DeductiveLogic::instance();
  a.kb = make_kb(f.abox, RuleProgram::empty(), f.equal, f.distinct);
  for (Symbol op : f.ops) a.op_names.insert(ops::resolve_alias(op));

  m.contexts.push_back(std::move(t));
  m.contexts.push_back(std::move(a));
  const int kT = 0, kA = 1;

  // porting bridge rules, in deterministic name order
  std::vector<std::pair<Symbol, size_t>> sorted(ported.begin(), ported.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) {
              return x.first.str() < y.first.str();
            });
  for (const auto& [name, arity] : sorted) {
    BridgeRule r;
    r.head_ctx = kT;
    r.op = ops::add();
    Atom pattern = arity == 1 ? concept_atom(name, var("X"))
                              : role_atom(name, var("X"), var("Y"));
    r.arg = OpArg::make_atom(pattern);
    r.body = {QueryLiteral(kA, LiteralCore::positive(pattern))};
    m.bridges.push_back(std::move(r));
  }
  {
    // equality porting
    BridgeRule r;
    r.head_ctx = kT;
    r.op = ops::add();
    r.arg = OpArg::make_equality(var("X"), var("Y"));
    r.body = {QueryLiteral(kA, LiteralCore::equality(var("X"), var("Y")))};
    m.bridges.push_back(std::move(r));
  }

  m.limits = default_limits_for(m);
  m.validate();
  return m;
}

Problem encode_ontology_problem(const OntologyFixture& f) {
  Problem p;
  p.mcs = encode_ontology(f);
  p.aics = f.aics;
  validate_aics(p.mcs, p.aics);
  return p;
}

Mcs encode_database(const std::set<Atom>& facts) {
  Mcs m;
  ManagedContext db;
  db.name = "DB";
  db.logic = DeductiveLogic::instance();
  db.kb = make_kb(facts, RuleProgram::empty());
  db.op_names = {ops::add(), ops::del()};
  m.contexts.push_back(std::move(db));
  m.limits = default_limits_for(m);
  return m;
}

Aic translate_database_aic(const DatabaseAic& r) {
  Aic out;
  out.name = r.name;
  std::vector<Atom> positive, negative;
  for (const LiteralCore& l : r.body) {
    if (l.kind != LiteralCore::Kind::Atom)
      throw std::invalid_argument(
          "database AIC bodies consist of atom literals");
    (l.negated ? negative : positive).push_back(l.atom);
    out.body.emplace_back(0, l);
  }
  if (r.head.empty())
    throw std::invalid_argument("database AIC has an empty head");
  for (const auto& [insert, atom] : r.head) {
    const std::vector<Atom>& pool = insert ? negative : positive;
    if (std::find(pool.begin(), pool.end(), atom) == pool.end())
      throw std::invalid_argument(
          "database AIC head action " + std::string(insert ? "+" : "-") +
          atom.render() + " does not match a body literal of the required "
                          "polarity");
    out.head.push_back(
        UpdateAction{0, insert ? ops::add() : ops::del(),
                     OpArg::make_atom(atom)});
  }
  return out;
}

}  // namespace mcsr
