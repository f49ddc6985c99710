#include "mcsr/aic.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace mcsr {

bool UpdateAction::operator<(const UpdateAction& o) const {
  if (ctx != o.ctx) return ctx < o.ctx;
  if (op != o.op) {
    auto a = op.str(), b = o.op.str();
    if (a != b) return a < b;
  }
  return arg < o.arg;
}

std::string UpdateAction::render(const Mcs& m) const {
  return m.ctx(ctx).name + ":" + std::string(op.str()) + "(" + arg.render() +
         ")";
}

namespace {

std::string render_body(const Mcs& m, const std::vector<QueryLiteral>& body) {
  std::ostringstream os;
  for (size_t i = 0; i < body.size(); ++i) {
    if (i) os << ", ";
    LiteralCore pos = body[i].core;
    pos.negated = false;
    std::string rendered =
        "(" + m.ctx(body[i].ctx).name + ": " + pos.render() + ")";
    os << (body[i].core.negated ? "not " + rendered : rendered);
  }
  return os.str();
}

std::string render_head(const Mcs& m, const std::vector<UpdateAction>& head) {
  std::ostringstream os;
  for (size_t i = 0; i < head.size(); ++i) {
    if (i) os << " | ";
    os << "(" << m.ctx(head[i].ctx).name << ": " << head[i].op.str() << "("
       << head[i].arg.render() << "))";
  }
  return os.str();
}

}  // namespace

std::string Aic::render(const Mcs& m) const {
  return render_body(m, body) + " => " + render_head(m, head);
}

UpdateSet::UpdateSet(std::vector<UpdateAction> actions)
    : actions_(std::move(actions)) {
  std::sort(actions_.begin(), actions_.end());
  actions_.erase(std::unique(actions_.begin(), actions_.end()),
                 actions_.end());
}

bool UpdateSet::contains(const UpdateAction& a) const {
  return std::binary_search(actions_.begin(), actions_.end(), a);
}

bool UpdateSet::subset_of(const UpdateSet& o) const {
  return std::includes(o.actions_.begin(), o.actions_.end(), actions_.begin(),
                       actions_.end());
}

UpdateSet UpdateSet::with(const UpdateAction& a) const {
  std::vector<UpdateAction> v = actions_;
  v.push_back(a);
  return UpdateSet(std::move(v));
}

UpdateSet UpdateSet::union_with(const UpdateSet& o) const {
  std::vector<UpdateAction> v = actions_;
  v.insert(v.end(), o.actions_.begin(), o.actions_.end());
  return UpdateSet(std::move(v));
}

UpdateSet UpdateSet::minus(const UpdateSet& o) const {
  std::vector<UpdateAction> v;
  for (const UpdateAction& a : actions_)
    if (!o.contains(a)) v.push_back(a);
  return UpdateSet(std::move(v));
}

std::vector<std::vector<GroundOp>> UpdateSet::per_context(
    size_t n_contexts) const {
  std::vector<std::vector<GroundOp>> out(n_contexts);
  for (const UpdateAction& a : actions_)
    out.at(a.ctx).push_back(a.ground_op());
  return out;
}

std::string UpdateSet::render(const Mcs& m) const {
  std::vector<std::string> parts;
  for (const UpdateAction& a : actions_) parts.push_back(a.render(m));
  std::sort(parts.begin(), parts.end());
  std::string out = "{";
  for (size_t i = 0; i < parts.size(); ++i)
    out += (i ? ", " : "") + parts[i];
  return out + "}";
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_arity(const Atom& a, std::map<Symbol, size_t>& arity,
                   const std::string& where) {
  auto [it, inserted] = arity.emplace(a.pred(), a.arity());
  if (!inserted && it->second != a.arity())
    throw std::invalid_argument(
        "arity clash for predicate '" + std::string(a.pred().str()) + "' in " +
        where + ": " + std::to_string(a.arity()) + " vs " +
        std::to_string(it->second));
}

}  // namespace

void validate_aics(const Mcs& m, const std::vector<Aic>& aics) {
  int n = static_cast<int>(m.size());
  std::map<Symbol, size_t> arity;

  // seed arities from the system itself
  for (const BridgeRule& r : m.bridges) {
    if (r.arg.kind == OpArg::Kind::Atom || r.arg.kind == OpArg::Kind::NegAtom)
      collect_arity(r.arg.atom, arity, "bridge rules");
    for (const QueryLiteral& l : r.body)
      if (l.core.kind == LiteralCore::Kind::Atom)
        collect_arity(l.core.atom, arity, "bridge rules");
  }

  for (const Aic& aic : aics) {
    const std::string where = "AIC '" + aic.name + "'";
    if (aic.head.empty())
      throw std::invalid_argument(where + " has an empty head");
    std::set<Symbol> binding;
    for (const QueryLiteral& l : aic.body) {
      if (l.ctx < 0 || l.ctx >= n)
        throw std::invalid_argument(where + ": body context out of range");
      if (l.core.kind == LiteralCore::Kind::Atom)
        collect_arity(l.core.atom, arity, where);
      std::vector<Symbol> vs;
      l.core.collect_binding_vars(vs);
      binding.insert(vs.begin(), vs.end());
    }
    auto require_bound = [&](const std::vector<Symbol>& vs,
                             const std::string& what) {
      for (Symbol v : vs)
        if (!binding.count(v))
          throw std::invalid_argument(
              where + ": variable " + std::string(v.str()) + " in " + what +
              " does not occur in a positive body literal");
    };
    for (const QueryLiteral& l : aic.body) {
      if (!l.core.negated) continue;
      std::vector<Symbol> vs;
      l.core.collect_vars(vs);
      require_bound(vs, "'" + l.core.render() + "'");
    }
    for (const UpdateAction& a : aic.head) {
      if (a.ctx < 0 || a.ctx >= n)
        throw std::invalid_argument(where + ": head context out of range");
      const ManagedContext& c = m.ctx(a.ctx);
      Symbol op = c.logic->resolve_op(a.op);
      if (!c.op_names.count(op))
        throw std::invalid_argument(
            where + ": operation '" + std::string(a.op.str()) +
            "' is not an operation of context " + c.name);
      if (auto err = c.logic->validate_op(op, a.arg, /*bridge_head=*/false))
        throw std::invalid_argument(where + ": " + *err);
      if (a.arg.kind == OpArg::Kind::Atom ||
          a.arg.kind == OpArg::Kind::NegAtom)
        collect_arity(a.arg.atom, arity, where);
      std::vector<Symbol> vs;
      a.arg.collect_vars(vs);
      require_bound(vs, "the head action " + std::string(a.op.str()) + "(" +
                            a.arg.render() + ")");
    }
  }
}

std::set<Symbol> active_domain(const Mcs& m, const std::vector<Aic>& aics) {
  std::set<Symbol> out = m.active_domain();
  std::vector<Symbol> cs;
  for (const Aic& aic : aics) {
    for (const QueryLiteral& l : aic.body) l.core.collect_consts(cs);
    for (const UpdateAction& a : aic.head) a.arg.collect_consts(cs);
  }
  out.insert(cs.begin(), cs.end());
  return out;
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

std::vector<GroundAic> ground_aics_over(const Mcs& m,
                                        const std::vector<Aic>& aics,
                                        const std::set<Symbol>& domain);

}  // namespace

std::vector<GroundAic> ground_aics(const Mcs& m, const std::vector<Aic>& aics) {
  return ground_aics_over(m, aics, active_domain(m, aics));
}

namespace {

std::vector<GroundAic> ground_aics_over(const Mcs& m,
                                        const std::vector<Aic>& aics,
                                        const std::set<Symbol>& domain) {
  std::vector<GroundAic> out;

  for (const Aic& aic : aics) {
    std::vector<Symbol> vars;
    {
      std::vector<Symbol> vs;
      for (const QueryLiteral& l : aic.body) l.core.collect_vars(vs);
      for (const UpdateAction& a : aic.head) a.arg.collect_vars(vs);
      std::set<Symbol> uniq(vs.begin(), vs.end());
      vars.assign(uniq.begin(), uniq.end());
      std::sort(vars.begin(), vars.end(), SymbolNameLess{});
    }

    Bindings b;
    std::function<void(size_t)> go = [&](size_t i) {
      if (i == vars.size()) {
        GroundAic g;
        g.label = aic.name;
        if (!vars.empty()) {
          std::string suffix;
          for (Symbol v : vars) {
            if (!suffix.empty()) suffix += ",";
            suffix += std::string(v.str()) + "=" + std::string(b[v].str());
          }
          g.label += "[" + suffix + "]";
        }
        for (const QueryLiteral& l : aic.body)
          g.body.emplace_back(l.ctx, l.core.substituted(b));
        for (const UpdateAction& a : aic.head)
          g.head.push_back(UpdateAction{a.ctx, a.op, a.arg.substituted(b)});
        Aic whole{g.label, g.body, g.head};
        g.rendered = whole.render(m);
        out.push_back(std::move(g));
        return;
      }
      for (Symbol c : domain) {
        b[vars[i]] = c;
        go(i + 1);
      }
      b.erase(vars[i]);
    };
    go(0);
  }

  std::sort(out.begin(), out.end(), [](const GroundAic& a, const GroundAic& b) {
    if (a.rendered != b.rendered) return a.rendered < b.rendered;
    return a.label < b.label;
  });
  return out;
}

// grounding universe extended by the constants an update set mentions
std::set<Symbol> domain_with_set(const Mcs& m, const std::vector<Aic>& aics,
                                 const UpdateSet& u) {
  std::set<Symbol> domain = active_domain(m, aics);
  std::vector<Symbol> cs;
  for (const UpdateAction& a : u.actions()) a.arg.collect_consts(cs);
  domain.insert(cs.begin(), cs.end());
  return domain;
}

}  // namespace

// ---------------------------------------------------------------------------
// Satisfaction

bool satisfies_state(const BeliefState& s, const GroundAic& r) {
  for (const QueryLiteral& l : r.body)
    if (!literal_holds(l, s)) return true;  // body falsified: rule holds
  return false;
}

bool satisfies(const Mcs& m, const GroundAic& r) {
  auto s = compute_equilibrium(m);
  if (!s)
    throw LogicallyInconsistentError(
        "satisfaction undefined: the system is logically inconsistent");
  return satisfies_state(*s, r);
}

// ---------------------------------------------------------------------------
// Update-set consistency (permutation independence) via subset dynamics

namespace {

// All kbs reachable by applying the actions in some order, grouped by
// subset mask. Kb values are deduplicated by fingerprint + equality.
class OrderDynamics {
 public:
  OrderDynamics(const Logic& logic, KbPtr kb,
                std::vector<GroundOp> actions)
      : logic_(logic), actions_(std::move(actions)) {
    results_.resize(size_t{1} << actions_.size());
    results_[0].push_back(std::move(kb));
  }

  const std::vector<KbPtr>& reachable(uint32_t mask) {
    assert(mask < results_.size());
    if (mask != 0 && results_[mask].empty()) {
      std::vector<KbPtr>& out = results_[mask];
      for (size_t i = 0; i < actions_.size(); ++i) {
        if (!(mask & (1u << i))) continue;
        for (const KbPtr& prev : reachable(mask & ~(1u << i))) {
          KbPtr next = logic_.apply(prev, std::span(&actions_[i], 1));
          bool dup = false;
          for (const KbPtr& seen : out)
            if (logic_.kb_equal(seen, next)) {
              dup = true;
              break;
            }
          if (!dup) out.push_back(std::move(next));
        }
      }
    }
    return results_[mask];
  }

  const std::vector<GroundOp>& actions() const { return actions_; }

 private:
  const Logic& logic_;
  std::vector<GroundOp> actions_;
  std::vector<std::vector<KbPtr>> results_;
};

}  // namespace

bool is_consistent_update_set(const Mcs& m, const UpdateSet& u,
                              int max_per_context) {
  auto slices = u.per_context(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    std::vector<GroundOp>& slice = slices[i];
    if (slice.empty()) continue;
    if (static_cast<int>(slice.size()) > max_per_context)
      throw BoundError("permutation check bound exceeded: " +
                       std::to_string(slice.size()) + " actions for context " +
                       m.ctx(i).name);
    std::sort(slice.begin(), slice.end());
    const Logic& logic = *m.ctx(i).logic;
    OrderDynamics dyn(logic, m.ctx(i).kb, slice);
    uint32_t full = (uint32_t{1} << slice.size()) - 1;
    const auto& finals = dyn.reachable(full);
    if (finals.size() != 1) return false;
    KbPtr one_shot = logic.apply(m.ctx(i).kb, slice);
    if (!logic.kb_equal(finals.front(), one_shot)) return false;
  }
  return true;
}

Mcs apply_update_set(const Mcs& m, const UpdateSet& u) {
  int bound = std::max<int>(8, static_cast<int>(u.size()));
  if (!is_consistent_update_set(m, u, bound))
    throw OperationError("inconsistent update set " + u.render(m));
  Mcs out = m;
  auto slices = u.per_context(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    if (slices[i].empty()) continue;
    std::sort(slices[i].begin(), slices[i].end());
    out.contexts[i].kb = m.ctx(i).logic->apply(m.ctx(i).kb, slices[i]);
  }
  return out;
}

namespace {

// Applies without the consistency precondition; used where consistency was
// established separately.
Mcs apply_unchecked(const Mcs& m, const UpdateSet& u) {
  Mcs out = m;
  auto slices = u.per_context(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    if (slices[i].empty()) continue;
    std::sort(slices[i].begin(), slices[i].end());
    out.contexts[i].kb = m.ctx(i).logic->apply(m.ctx(i).kb, slices[i]);
  }
  return out;
}

}  // namespace

bool is_weak_repair(const Mcs& m, const std::vector<Aic>& aics,
                    const UpdateSet& u) {
  m.validate();
  int bound = std::max<int>(8, static_cast<int>(u.size()));
  if (!is_consistent_update_set(m, u, bound)) return false;
  Mcs variant = apply_unchecked(m, u);
  auto s = compute_equilibrium_prevalidated(variant);
  if (!s) return false;
  for (const GroundAic& g : ground_aics_over(m, aics, domain_with_set(m, aics, u)))
    if (!satisfies_state(*s, g)) return false;
  return true;
}

bool is_grounded_repair(const Mcs& m, const std::vector<Aic>& aics,
                        const UpdateSet& u) {
  if (u.size() > 16)
    throw BoundError("grounded-repair subset check bound exceeded: " +
                     std::to_string(u.size()) + " actions");
  if (!is_weak_repair(m, aics, u)) return false;
  if (u.empty()) return true;  // no proper subsets to certify

  std::vector<GroundAic> ground =
      ground_aics_over(m, aics, domain_with_set(m, aics, u));
  const auto& all = u.actions();
  uint32_t full = (uint32_t{1} << all.size()) - 1;
  for (uint32_t mask = 0; mask < full; ++mask) {
    std::vector<UpdateAction> sub;
    for (size_t i = 0; i < all.size(); ++i)
      if (mask & (1u << i)) sub.push_back(all[i]);
    UpdateSet v(std::move(sub));
    UpdateSet rest = u.minus(v);

    // V(M) |= r is false whenever the variant is undefined (inconsistent
    // update set) or has no equilibrium.
    std::optional<BeliefState> s;
    bool defined = false;
    try {
      int bound = std::max<int>(8, static_cast<int>(v.size()));
      if (is_consistent_update_set(m, v, bound)) {
        s = compute_equilibrium_prevalidated(apply_unchecked(m, v));
        defined = s.has_value();
      }
    } catch (const OperationError&) {
      defined = false;
    }

    bool found = false;
    for (const GroundAic& g : ground) {
      if (defined && satisfies_state(*s, g)) continue;  // V(M) |= g
      bool head_hits = false;
      for (const UpdateAction& a : g.head)
        if (rest.contains(a)) {
          head_hits = true;
          break;
        }
      if (head_hits) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace mcsr
