#include "mcsr/literal.hpp"

#include <sstream>
#include <tuple>

namespace mcsr {

Term substitute(const Term& t, const Bindings& b) {
  if (t.is_variable()) {
    auto it = b.find(t.sym());
    if (it != b.end()) return Term::constant(it->second);
  }
  return t;
}

Atom substitute(const Atom& a, const Bindings& b) {
  std::vector<Term> args = a.args();
  for (Term& t : args) t = substitute(t, b);
  return Atom(a.pred(), std::move(args));
}

bool match_atom(const Atom& pattern, const Atom& fact, const UnionFind& eq,
                Bindings& b, std::vector<Symbol>& trail) {
  if (pattern.pred() != fact.pred() || pattern.arity() != fact.arity())
    return false;
  size_t mark = trail.size();
  for (size_t i = 0; i < pattern.arity(); ++i) {
    const Term& p = pattern.args()[i];
    Symbol c = fact.args()[i].sym();  // facts are canonical
    bool ok;
    if (p.is_constant()) {
      ok = eq.find(p.sym()) == c;
    } else {
      auto it = b.find(p.sym());
      if (it == b.end()) {
        b.emplace(p.sym(), c);
        trail.push_back(p.sym());
        ok = true;
      } else {
        ok = it->second == c;
      }
    }
    if (!ok) {
      while (trail.size() > mark) {
        b.erase(trail.back());
        trail.pop_back();
      }
      return false;
    }
  }
  return true;
}

LiteralCore LiteralCore::positive(Atom a) {
  LiteralCore l;
  l.kind = Kind::Atom;
  l.atom = std::move(a);
  return l;
}

LiteralCore LiteralCore::negative(Atom a) {
  LiteralCore l = positive(std::move(a));
  l.negated = true;
  return l;
}

LiteralCore LiteralCore::equality(Term lhs, Term rhs, bool negated) {
  LiteralCore l;
  l.kind = Kind::Equality;
  l.negated = negated;
  l.lhs = lhs;
  l.rhs = rhs;
  return l;
}

LiteralCore LiteralCore::at_most(int k, Symbol role, Term subject,
                                 bool negated) {
  LiteralCore l;
  l.kind = Kind::AtMost;
  l.negated = negated;
  l.bound = k;
  l.role = role;
  l.subject = subject;
  return l;
}

bool LiteralCore::ground() const {
  switch (kind) {
    case Kind::Atom:
      return atom.ground();
    case Kind::Equality:
      return lhs.is_constant() && rhs.is_constant();
    case Kind::AtMost:
      return subject.is_constant();
  }
  return false;
}

LiteralCore LiteralCore::substituted(const Bindings& b) const {
  LiteralCore l = *this;
  switch (kind) {
    case Kind::Atom:
      l.atom = substitute(atom, b);
      break;
    case Kind::Equality:
      l.lhs = substitute(lhs, b);
      l.rhs = substitute(rhs, b);
      break;
    case Kind::AtMost:
      l.subject = substitute(subject, b);
      break;
  }
  return l;
}

void LiteralCore::collect_vars(std::vector<Symbol>& out) const {
  switch (kind) {
    case Kind::Atom:
      atom.collect_vars(out);
      break;
    case Kind::Equality:
      if (lhs.is_variable()) out.push_back(lhs.sym());
      if (rhs.is_variable()) out.push_back(rhs.sym());
      break;
    case Kind::AtMost:
      if (subject.is_variable()) out.push_back(subject.sym());
      break;
  }
}

void LiteralCore::collect_binding_vars(std::vector<Symbol>& out) const {
  if (negated) return;
  collect_vars(out);
}

void LiteralCore::collect_consts(std::vector<Symbol>& out) const {
  switch (kind) {
    case Kind::Atom:
      atom.collect_consts(out);
      break;
    case Kind::Equality:
      if (lhs.is_constant()) out.push_back(lhs.sym());
      if (rhs.is_constant()) out.push_back(rhs.sym());
      break;
    case Kind::AtMost:
      if (subject.is_constant()) out.push_back(subject.sym());
      break;
  }
}

std::string LiteralCore::render() const {
  std::ostringstream os;
  if (negated) os << "not ";
  switch (kind) {
    case Kind::Atom:
      os << atom.render();
      break;
    case Kind::Equality:
      os << lhs.str() << " = " << rhs.str();
      break;
    case Kind::AtMost:
      os << "atmost(" << bound << ", " << role.str() << ", " << subject.str()
         << ")";
      break;
  }
  return os.str();
}

bool LiteralCore::operator==(const LiteralCore& o) const {
  return kind == o.kind && negated == o.negated && atom == o.atom &&
         lhs == o.lhs && rhs == o.rhs && bound == o.bound && role == o.role &&
         subject == o.subject;
}

bool LiteralCore::operator<(const LiteralCore& o) const {
  auto key = [](const LiteralCore& l) {
    return std::tie(l.kind, l.negated, l.atom, l.lhs, l.rhs, l.bound, l.role,
                    l.subject);
  };
  return key(*this) < key(o);
}

OpArg OpArg::make_atom(Atom a) {
  OpArg r;
  r.kind = Kind::Atom;
  r.atom = std::move(a);
  return r;
}

OpArg OpArg::make_neg_atom(Atom a) {
  OpArg r;
  r.kind = Kind::NegAtom;
  r.atom = std::move(a);
  return r;
}

OpArg OpArg::make_equality(Term l, Term r) {
  OpArg a;
  a.kind = Kind::Equality;
  // normalize ground equalities so that assertEqual(x = y) and
  // assertEqual(y = x) denote the same action
  if (l.is_constant() && r.is_constant() && r.str() < l.str()) std::swap(l, r);
  a.lhs = l;
  a.rhs = r;
  return a;
}

OpArg OpArg::make_neg_exists_inv(Symbol role, Term subject) {
  OpArg a;
  a.kind = Kind::NegExistsInv;
  a.role = role;
  a.subject = subject;
  return a;
}

bool OpArg::ground() const {
  switch (kind) {
    case Kind::Atom:
    case Kind::NegAtom:
      return atom.ground();
    case Kind::Equality:
      return lhs.is_constant() && rhs.is_constant();
    case Kind::NegExistsInv:
      return subject.is_constant();
  }
  return false;
}

OpArg OpArg::substituted(const Bindings& b) const {
  switch (kind) {
    case Kind::Atom:
      return make_atom(substitute(atom, b));
    case Kind::NegAtom:
      return make_neg_atom(substitute(atom, b));
    case Kind::Equality:
      return make_equality(substitute(lhs, b), substitute(rhs, b));
    case Kind::NegExistsInv:
      return make_neg_exists_inv(role, substitute(subject, b));
  }
  return *this;
}

void OpArg::collect_vars(std::vector<Symbol>& out) const {
  switch (kind) {
    case Kind::Atom:
    case Kind::NegAtom:
      atom.collect_vars(out);
      break;
    case Kind::Equality:
      if (lhs.is_variable()) out.push_back(lhs.sym());
      if (rhs.is_variable()) out.push_back(rhs.sym());
      break;
    case Kind::NegExistsInv:
      if (subject.is_variable()) out.push_back(subject.sym());
      break;
  }
}

void OpArg::collect_consts(std::vector<Symbol>& out) const {
  switch (kind) {
    case Kind::Atom:
    case Kind::NegAtom:
      atom.collect_consts(out);
      break;
    case Kind::Equality:
      if (lhs.is_constant()) out.push_back(lhs.sym());
      if (rhs.is_constant()) out.push_back(rhs.sym());
      break;
    case Kind::NegExistsInv:
      if (subject.is_constant()) out.push_back(subject.sym());
      break;
  }
}

std::string OpArg::render() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Atom:
      os << atom.render();
      break;
    case Kind::NegAtom:
      os << "not " << atom.render();
      break;
    case Kind::Equality:
      os << lhs.str() << " = " << rhs.str();
      break;
    case Kind::NegExistsInv:
      os << "not exists(" << role.str() << "^R)(" << subject.str() << ")";
      break;
  }
  return os.str();
}

bool OpArg::operator==(const OpArg& o) const {
  return kind == o.kind && atom == o.atom && lhs == o.lhs && rhs == o.rhs &&
         role == o.role && subject == o.subject;
}

bool OpArg::operator<(const OpArg& o) const {
  auto key = [](const OpArg& a) {
    return std::tie(a.kind, a.atom, a.lhs, a.rhs, a.role, a.subject);
  };
  return key(*this) < key(o);
}

}  // namespace mcsr
