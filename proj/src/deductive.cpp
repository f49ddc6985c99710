#include "mcsr/deductive.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcsr {

namespace {

std::pair<Symbol, Symbol> name_sorted(Symbol a, Symbol b) {
  if (SymbolNameLess{}(b, a)) std::swap(a, b);
  return {a, b};
}

}  // namespace

std::string HornRule::render() const {
  std::ostringstream os;
  os << head.render() << " <- ";
  for (size_t i = 0; i < body.size(); ++i) {
    if (i) os << ", ";
    os << body[i].render();
  }
  return os.str();
}

std::optional<std::string> check_rule_safety(const HornRule& rule) {
  std::set<Symbol> bound;
  for (const LiteralCore& l : rule.body) {
    if (l.kind == LiteralCore::Kind::Atom && !l.negated) {
      std::vector<Symbol> vs;
      l.atom.collect_vars(vs);
      bound.insert(vs.begin(), vs.end());
    }
  }
  auto all_bound = [&](const std::vector<Symbol>& vs) -> std::optional<Symbol> {
    for (Symbol v : vs)
      if (!bound.count(v)) return v;
    return std::nullopt;
  };
  std::vector<Symbol> head_vars;
  rule.head.collect_vars(head_vars);
  if (auto v = all_bound(head_vars))
    return "head variable " + std::string(v->str()) +
           " not bound by a positive body atom";
  for (const LiteralCore& l : rule.body) {
    if (l.kind == LiteralCore::Kind::Atom && !l.negated) continue;
    std::vector<Symbol> vs;
    l.collect_vars(vs);
    if (auto v = all_bound(vs))
      return "variable " + std::string(v->str()) + " in " + l.render() +
             " not bound by a positive body atom";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RuleProgram: predicate-level stratification inside one context.

RuleProgram::RuleProgram(std::vector<HornRule> rules)
    : rules_(std::move(rules)) {
  for (const HornRule& r : rules_) {
    if (auto err = check_rule_safety(r))
      throw std::invalid_argument("unsafe rule '" + r.render() +
                                  "': " + *err);
  }

  // Dependency graph over predicates: edge body-pred -> head-pred,
  // negative when the body literal is negated or a cardinality test.
  std::map<Symbol, std::set<Symbol>> pos, neg;
  std::set<Symbol> preds;
  for (const HornRule& r : rules_) {
    preds.insert(r.head.pred());
    for (const LiteralCore& l : r.body) {
      if (l.kind == LiteralCore::Kind::Atom) {
        preds.insert(l.atom.pred());
        (l.negated ? neg : pos)[l.atom.pred()].insert(r.head.pred());
      } else if (l.kind == LiteralCore::Kind::AtMost) {
        preds.insert(l.role);
        neg[l.role].insert(r.head.pred());
      }
      // equality tests read the kb's union-find, which rules cannot
      // change; no edge needed
    }
  }

  // Stratum levels: smallest solution of
  //   level(head) >= level(body)           for positive edges
  //   level(head) >= level(body) + 1       for negative edges
  std::map<Symbol, int> level;
  for (Symbol p : preds) level[p] = 0;
  int n = static_cast<int>(preds.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [b, heads] : pos)
      for (Symbol h : heads)
        if (level[h] < level[b]) level[h] = level[b], changed = true;
    for (const auto& [b, heads] : neg)
      for (Symbol h : heads)
        if (level[h] < level[b] + 1) level[h] = level[b] + 1, changed = true;
    for (const auto& [p, lv] : level) {
      // a level can only exceed the predicate count on a negation cycle
      if (lv > n)
        throw StratificationError(
            "rule set is not stratified: negation cycle through predicate '" +
            std::string(p.str()) + "'");
    }
  }

  int max_level = 0;
  for (const auto& [p, lv] : level) max_level = std::max(max_level, lv);
  strata_.assign(max_level + 1, {});
  for (size_t i = 0; i < rules_.size(); ++i)
    strata_[level[rules_[i].head.pred()]].push_back(i);
}

void RuleProgram::collect_dependencies(int ctx_index,
                                       std::vector<DepEdge>& out) const {
  for (const HornRule& r : rules_) {
    for (const LiteralCore& l : r.body) {
      if (l.kind == LiteralCore::Kind::Atom) {
        out.push_back({ctx_index, l.atom.pred(), ctx_index, r.head.pred(),
                       l.negated});
      } else if (l.kind == LiteralCore::Kind::AtMost) {
        out.push_back({ctx_index, l.role, ctx_index, r.head.pred(), true});
        out.push_back(
            {ctx_index, Symbol::intern("="), ctx_index, r.head.pred(), true});
      } else {
        out.push_back({ctx_index, Symbol::intern("="), ctx_index,
                       r.head.pred(), l.negated});
      }
    }
  }
}

std::shared_ptr<const RuleProgram> RuleProgram::empty() {
  static const auto kEmpty =
      std::make_shared<const RuleProgram>(std::vector<HornRule>{});
  return kEmpty;
}

// ---------------------------------------------------------------------------
// DeductiveKb

bool DeductiveKb::equal_ok() const {
  for (const auto& [a, b] : distinct)
    if (eq.same(a, b)) return false;
  return true;
}

bool DeductiveKb::operator==(const DeductiveKb& o) const {
  return failed == o.failed && facts == o.facts && eq == o.eq &&
         distinct == o.distinct && program->rules() == o.program->rules();
}

std::string DeductiveKb::render() const {
  std::ostringstream os;
  if (failed) {
    os << "<failed: " << fail_reason << ">";
    return os.str();
  }
  std::vector<std::string> parts;
  for (const Atom& a : facts) parts.push_back(a.render());
  std::sort(parts.begin(), parts.end());
  os << "{";
  for (size_t i = 0; i < parts.size(); ++i) os << (i ? ", " : "") << parts[i];
  os << "}";
  for (const auto& cls : eq.nontrivial_classes())
    for (size_t i = 1; i < cls.size(); ++i)
      os << " " << cls[i].str() << "=" << cls[0].str();
  for (const auto& [a, b] : distinct)
    os << " " << a.str() << "!=" << b.str();
  return os.str();
}

size_t DeductiveKb::fingerprint() const {
  return static_cast<size_t>(fnv1a(render()));
}

DeductiveKbPtr make_kb(std::set<Atom> facts,
                       std::shared_ptr<const RuleProgram> program,
                       const std::vector<std::pair<Symbol, Symbol>>& equal,
                       const std::vector<std::pair<Symbol, Symbol>>& distinct) {
  auto kb = std::make_shared<DeductiveKb>();
  kb->program = program ? std::move(program) : RuleProgram::empty();
  for (const auto& [a, b] : equal) kb->eq.merge(a, b);
  for (const Atom& a : facts) {
    if (!a.ground())
      throw std::invalid_argument("kb fact is not ground: " + a.render());
    kb->facts.insert(a.canonical(kb->eq));
  }
  for (const auto& [a, b] : distinct) {
    if (kb->eq.same(a, b))
      throw std::invalid_argument("distinct(" + std::string(a.str()) + ", " +
                                  std::string(b.str()) +
                                  ") contradicts asserted equalities");
    kb->distinct.insert(name_sorted(kb->eq.find(a), kb->eq.find(b)));
  }
  return kb;
}

// ---------------------------------------------------------------------------
// Least-model evaluation

namespace {

class ModelIndex {
 public:
  explicit ModelIndex(const BeliefSet& model) : model_(model) {
    for (const Atom& a : model.atoms()) by_pred_[a.pred()].push_back(&a);
  }

  const std::vector<const Atom*>& candidates(Symbol pred) const {
    static const std::vector<const Atom*> kNone;
    auto it = by_pred_.find(pred);
    return it == by_pred_.end() ? kNone : it->second;
  }

  const BeliefSet& model() const { return model_; }

 private:
  const BeliefSet& model_;
  std::map<Symbol, std::vector<const Atom*>> by_pred_;
};

bool eval_ground_literal(const LiteralCore& l, const BeliefSet& model) {
  bool v = false;
  switch (l.kind) {
    case LiteralCore::Kind::Atom:
      v = model.contains(l.atom);
      break;
    case LiteralCore::Kind::Equality:
      v = model.equal(l.lhs.sym(), l.rhs.sym());
      break;
    case LiteralCore::Kind::AtMost:
      v = eval_count_at_most(model, l.bound, l.role, l.subject.sym());
      break;
  }
  return l.negated ? !v : v;
}

// Enumerates bindings that satisfy the rule body against the index and
// calls sink for each. Positive atoms are matched first; everything else
// is evaluated as a ground filter.
void match_body(const std::vector<LiteralCore>& body, const ModelIndex& index,
                const std::function<void(const Bindings&)>& sink) {
  std::vector<const LiteralCore*> joins, filters;
  for (const LiteralCore& l : body) {
    if (l.kind == LiteralCore::Kind::Atom && !l.negated)
      joins.push_back(&l);
    else
      filters.push_back(&l);
  }
  Bindings b;
  std::vector<Symbol> trail;
  std::function<void(size_t)> step = [&](size_t i) {
    if (i == joins.size()) {
      for (const LiteralCore* f : filters)
        if (!eval_ground_literal(f->substituted(b), index.model())) return;
      sink(b);
      return;
    }
    size_t mark = trail.size();
    for (const Atom* fact : index.candidates(joins[i]->atom.pred())) {
      if (match_atom(joins[i]->atom, *fact, index.model().eq(), b, trail)) {
        step(i + 1);
        while (trail.size() > mark) {
          b.erase(trail.back());
          trail.pop_back();
        }
      }
    }
  };
  step(0);
}

}  // namespace

std::optional<BeliefSet> least_model(const DeductiveKb& kb,
                                     const EvalLimits& limits) {
  if (kb.failed) return std::nullopt;
  BeliefSet model(kb.facts, kb.eq);
  int rounds = 0;
  for (const auto& stratum : kb.program->strata()) {
    bool changed = true;
    while (changed) {
      if (++rounds > limits.max_rounds) return std::nullopt;
      changed = false;
      ModelIndex index(model);
      std::vector<Atom> derived;
      for (size_t ri : stratum) {
        const HornRule& rule = kb.program->rules()[ri];
        match_body(rule.body, index, [&](const Bindings& b) {
          Atom head = substitute(rule.head, b).canonical(model.eq());
          if (!model.contains(head)) derived.push_back(head);
        });
      }
      for (const Atom& a : derived) {
        if (!model.contains(a)) {
          model.insert(a);
          changed = true;
        }
      }
    }
  }
  return model;
}

bool eval_count_at_most(const BeliefSet& model, int k, Symbol role,
                        Symbol subject) {
  return model.count_role_fillers(role, subject) <= k;
}

// ---------------------------------------------------------------------------
// Operation library

namespace ops {

Symbol add() { return Symbol::intern("add"); }
Symbol del() { return Symbol::intern("del"); }
Symbol assert_equal() { return Symbol::intern("assertEqual"); }
Symbol web_enroll() { return Symbol::intern("webEnroll"); }
Symbol unregister() { return Symbol::intern("unregister"); }
Symbol redistribute() { return Symbol::intern("redistribute"); }

const std::set<Symbol>& library() {
  static const std::set<Symbol> kOps = {add(),        del(),
                                        assert_equal(), web_enroll(),
                                        unregister(), redistribute()};
  return kOps;
}

bool is_compound(Symbol op) {
  return op == web_enroll() || op == unregister() || op == redistribute();
}

std::optional<OpArg::Kind> arg_shape(Symbol op) {
  if (op == add() || op == del() || op == web_enroll())
    return OpArg::Kind::Atom;
  if (op == assert_equal()) return OpArg::Kind::Equality;
  if (op == unregister()) return OpArg::Kind::NegExistsInv;
  if (op == redistribute()) return OpArg::Kind::NegAtom;
  return std::nullopt;
}

Symbol resolve_alias(Symbol op) {
  if (op == Symbol::intern("assert")) return assert_equal();
  return op;
}

}  // namespace ops

namespace {

Symbol sym_enrolled() { return Symbol::intern("enrolled"); }
Symbol sym_web_enrolled() { return Symbol::intern("webEnrolled"); }
Symbol sym_class() { return Symbol::intern("class"); }

DeductiveKb failed_kb(const DeductiveKb& kb, std::string reason) {
  DeductiveKb out = kb;
  out.failed = true;
  out.fail_reason = std::move(reason);
  return out;
}

void insert_fact(DeductiveKb& kb, const Atom& a) {
  kb.facts.insert(a.canonical(kb.eq));
}

void erase_fact(DeductiveKb& kb, const Atom& a) {
  kb.facts.erase(a.canonical(kb.eq));
}

DeductiveKb do_assert_equal(const DeductiveKb& kb, Symbol a, Symbol b) {
  DeductiveKb out = kb;
  if (!out.eq.merge(a, b)) return out;
  for (const auto& [x, y] : out.distinct) {
    if (out.eq.same(x, y))
      return failed_kb(kb, "assertEqual(" + std::string(a.str()) + " = " +
                               std::string(b.str()) +
                               ") contradicts distinct(" +
                               std::string(x.str()) + ", " +
                               std::string(y.str()) + ")");
  }
  std::set<Atom> facts;
  for (const Atom& f : out.facts) facts.insert(f.canonical(out.eq));
  out.facts = std::move(facts);
  std::set<std::pair<Symbol, Symbol>> dist;
  for (const auto& [x, y] : out.distinct)
    dist.insert(name_sorted(out.eq.find(x), out.eq.find(y)));
  out.distinct = std::move(dist);
  return out;
}

// Distinct students with an (web)enrollment at class c.
int enrollment_count(const DeductiveKb& kb, Symbol c) {
  std::set<Symbol> students;
  for (const Atom& f : kb.facts) {
    if ((f.pred() == sym_enrolled() || f.pred() == sym_web_enrolled()) &&
        f.arity() == 2 && f.args()[0].sym() == c)
      students.insert(f.args()[1].sym());
  }
  return static_cast<int>(students.size());
}

// The asserted class other than closed with the fewest enrolled students;
// ties broken lexicographically. Returns empty symbol when none exists.
std::optional<Symbol> smallest_remaining_class(const DeductiveKb& kb,
                                               Symbol closed) {
  std::optional<Symbol> best;
  int best_count = 0;
  for (const Atom& f : kb.facts) {
    if (f.pred() != sym_class() || f.arity() != 1) continue;
    Symbol c = f.args()[0].sym();
    if (c == closed) continue;
    int count = enrollment_count(kb, c);
    if (!best || count < best_count ||
        (count == best_count && SymbolNameLess{}(c, *best))) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

DeductiveKb do_redistribute(const DeductiveKb& kb, Symbol closed) {
  DeductiveKb out = kb;
  erase_fact(out, Atom(sym_class(), {Term::constant(closed)}));
  // moves ordered by rendered atom text, target recomputed after each move
  for (;;) {
    std::vector<Atom> pending;
    for (const Atom& f : out.facts) {
      if ((f.pred() == sym_enrolled() || f.pred() == sym_web_enrolled()) &&
          f.arity() == 2 && f.args()[0].sym() == out.eq.find(closed))
        pending.push_back(f);
    }
    if (pending.empty()) break;
    std::sort(pending.begin(), pending.end(), AtomNameLess{});
    const Atom& move = pending.front();
    auto target = smallest_remaining_class(out, out.eq.find(closed));
    if (!target) return failed_kb(kb, "redistribute target missing");
    erase_fact(out, move);
    insert_fact(out, Atom(move.pred(),
                          {Term::constant(*target), move.args()[1]}));
  }
  return out;
}

}  // namespace

DeductiveKb apply_op(const DeductiveKb& kb, const GroundOp& op) {
  if (kb.failed) return kb;
  Symbol name = ops::resolve_alias(op.op);
  auto shape = ops::arg_shape(name);
  if (!shape)
    throw std::invalid_argument("unknown operation '" +
                                std::string(op.op.str()) + "'");
  // bridge rules may insert equalities through the plain add
  bool add_equality =
      name == ops::add() && op.arg.kind == OpArg::Kind::Equality;
  if (op.arg.kind != *shape && !add_equality)
    throw std::invalid_argument("operation " + std::string(name.str()) +
                                " does not accept argument " +
                                op.arg.render());
  if (!op.arg.ground())
    throw std::invalid_argument("operation argument is not ground: " +
                                op.render());

  if (add_equality)
    return do_assert_equal(kb, op.arg.lhs.sym(), op.arg.rhs.sym());
  if (name == ops::add()) {
    DeductiveKb out = kb;
    insert_fact(out, op.arg.atom);
    return out;
  }
  if (name == ops::del()) {
    DeductiveKb out = kb;
    erase_fact(out, op.arg.atom);
    return out;
  }
  if (name == ops::assert_equal())
    return do_assert_equal(kb, op.arg.lhs.sym(), op.arg.rhs.sym());
  if (name == ops::web_enroll()) {
    if (op.arg.atom.pred() != sym_web_enrolled() || op.arg.atom.arity() != 2)
      throw std::invalid_argument("webEnroll expects a webEnrolled(C, S) "
                                  "argument, got " +
                                  op.arg.render());
    DeductiveKb out = kb;
    erase_fact(out, Atom(sym_enrolled(), op.arg.atom.args()));
    insert_fact(out, op.arg.atom);
    return out;
  }
  if (name == ops::unregister()) {
    if (op.arg.role != sym_web_enrolled())
      throw std::invalid_argument(
          "unregister expects a webEnrolled^R argument, got " +
          op.arg.render());
    DeductiveKb out = kb;
    Symbol subject = out.eq.find(op.arg.subject.sym());
    std::vector<Atom> matches;
    for (const Atom& f : out.facts)
      if (f.pred() == sym_web_enrolled() && f.arity() == 2 &&
          f.args()[1].sym() == subject)
        matches.push_back(f);
    for (const Atom& f : matches) {
      erase_fact(out, f);
      insert_fact(out, Atom(sym_enrolled(), f.args()));
    }
    return out;
  }
  if (name == ops::redistribute()) {
    if (op.arg.atom.pred() != sym_class() || op.arg.atom.arity() != 1)
      throw std::invalid_argument(
          "redistribute expects a 'not class(C)' argument, got " +
          op.arg.render());
    return do_redistribute(kb, op.arg.atom.args()[0].sym());
  }
  throw std::invalid_argument("unknown operation '" + std::string(name.str()) +
                              "'");
}

DeductiveKb apply_ops(const DeductiveKb& kb, std::span<const GroundOp> ops) {
  std::vector<GroundOp> sorted(ops.begin(), ops.end());
  std::sort(sorted.begin(), sorted.end());
  DeductiveKb out = kb;
  for (const GroundOp& op : sorted) out = apply_op(out, op);
  return out;
}

DeductiveKbPtr apply_operation(const DeductiveKbPtr& kb, Symbol op,
                               const OpArg& arg) {
  DeductiveKb out = apply_op(*kb, GroundOp{op, arg});
  if (out.failed) throw OperationError(out.fail_reason);
  return std::make_shared<const DeductiveKb>(std::move(out));
}

// ---------------------------------------------------------------------------
// DeductiveLogic

std::shared_ptr<const DeductiveLogic> DeductiveLogic::instance() {
  static const auto kInstance = std::make_shared<const DeductiveLogic>();
  return kInstance;
}

const DeductiveKb& DeductiveLogic::kb_of(const KbPtr& kb) {
  const auto* p = dynamic_cast<const DeductiveKb*>(kb.get());
  assert(p != nullptr);
  return *p;
}

std::optional<BeliefSet> DeductiveLogic::accept(
    const KbPtr& kb, const EvalLimits& limits) const {
  return least_model(kb_of(kb), limits);
}

KbPtr DeductiveLogic::apply(const KbPtr& kb,
                            std::span<const GroundOp> ops) const {
  return std::make_shared<const DeductiveKb>(apply_ops(kb_of(kb), ops));
}

bool DeductiveLogic::kb_equal(const KbPtr& a, const KbPtr& b) const {
  return kb_of(a) == kb_of(b);
}

size_t DeductiveLogic::kb_fingerprint(const KbPtr& kb) const {
  return kb_of(kb).fingerprint();
}

std::string DeductiveLogic::render_kb(const KbPtr& kb) const {
  return kb_of(kb).render();
}

void DeductiveLogic::collect_constants(const KbPtr& kb,
                                       std::set<Symbol>& out) const {
  const DeductiveKb& d = kb_of(kb);
  std::vector<Symbol> cs;
  for (const Atom& a : d.facts) a.collect_consts(cs);
  for (const HornRule& r : d.program->rules()) {
    r.head.collect_consts(cs);
    for (const LiteralCore& l : r.body) l.collect_consts(cs);
  }
  for (const auto& [a, b] : d.distinct) {
    cs.push_back(a);
    cs.push_back(b);
  }
  for (const auto& cls : d.eq.nontrivial_classes())
    cs.insert(cs.end(), cls.begin(), cls.end());
  out.insert(cs.begin(), cs.end());
}

void DeductiveLogic::collect_predicates(const KbPtr& kb,
                                        std::set<Symbol>& out) const {
  const DeductiveKb& d = kb_of(kb);
  for (const Atom& a : d.facts) out.insert(a.pred());
  for (const HornRule& r : d.program->rules()) {
    out.insert(r.head.pred());
    for (const LiteralCore& l : r.body) {
      if (l.kind == LiteralCore::Kind::Atom)
        out.insert(l.atom.pred());
      else if (l.kind == LiteralCore::Kind::AtMost)
        out.insert(l.role);
    }
  }
}

void DeductiveLogic::collect_dependencies(const KbPtr& kb, int ctx_index,
                                          std::vector<DepEdge>& out) const {
  kb_of(kb).program->collect_dependencies(ctx_index, out);
}

Symbol DeductiveLogic::resolve_op(Symbol op) const {
  return ops::resolve_alias(op);
}

bool DeductiveLogic::op_is_plain_add(Symbol op) const {
  return ops::resolve_alias(op) == ops::add();
}

std::optional<std::string> DeductiveLogic::validate_op(Symbol op,
                                                       const OpArg& arg,
                                                       bool bridge_head) const {
  auto shape = ops::arg_shape(op);
  if (!shape) return "unknown operation '" + std::string(op.str()) + "'";
  if (arg.kind == *shape) {
  } else if (op == ops::add() && bridge_head &&
             arg.kind == OpArg::Kind::Equality) {
    // bridge-rule heads may insert equalities
  } else {
    return "operation " + std::string(op.str()) + " does not accept argument " +
           arg.render();
  }
  if (op == ops::web_enroll() &&
      (arg.atom.pred() != sym_web_enrolled() || arg.atom.arity() != 2))
    return "webEnroll expects a webEnrolled(C, S) argument, got " +
           arg.render();
  if (op == ops::unregister() && arg.role != sym_web_enrolled())
    return "unregister expects a webEnrolled^R argument, got " + arg.render();
  if (op == ops::redistribute() &&
      (arg.atom.pred() != sym_class() || arg.atom.arity() != 1))
    return "redistribute expects a 'not class(C)' argument, got " +
           arg.render();
  return std::nullopt;
}

}  // namespace mcsr
