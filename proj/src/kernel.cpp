#include "mcsr/kernel.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>

namespace mcsr {

namespace {

Symbol eq_pred() { return Symbol::intern("="); }

std::string render_core_in(const LiteralCore& core, const std::string& ctx) {
  LiteralCore positive = core;
  positive.negated = false;
  std::string s = "(" + ctx + ": " + positive.render() + ")";
  return core.negated ? "not " + s : s;
}

}  // namespace

bool BridgeRule::ground() const {
  if (!arg.ground()) return false;
  for (const QueryLiteral& l : body)
    if (!l.core.ground()) return false;
  return true;
}

std::string BridgeRule::render(const Mcs& m) const {
  std::ostringstream os;
  const ManagedContext& hc = m.ctx(head_ctx);
  os << "(" << hc.name << ": ";
  if (hc.logic->op_is_plain_add(hc.logic->resolve_op(op)) &&
      arg.kind == OpArg::Kind::Atom) {
    os << arg.atom.render();
  } else if (hc.logic->op_is_plain_add(hc.logic->resolve_op(op)) &&
             arg.kind == OpArg::Kind::Equality) {
    os << arg.lhs.str() << " = " << arg.rhs.str();
  } else {
    os << op.str() << "(" << arg.render() << ")";
  }
  os << ")";
  if (!body.empty()) {
    os << " <- ";
    for (size_t i = 0; i < body.size(); ++i) {
      if (i) os << ", ";
      os << render_core_in(body[i].core, m.ctx(body[i].ctx).name);
    }
  }
  return os.str();
}

int Mcs::context_index(std::string_view name) const {
  for (size_t i = 0; i < contexts.size(); ++i)
    if (contexts[i].name == name) return static_cast<int>(i);
  return -1;
}

std::set<Symbol> Mcs::active_domain() const {
  std::set<Symbol> out;
  for (const ManagedContext& c : contexts) {
    c.logic->collect_constants(c.kb, out);
    if (c.import_domain)
      out.insert(c.import_domain->begin(), c.import_domain->end());
  }
  std::vector<Symbol> cs;
  for (const BridgeRule& r : bridges) {
    r.arg.collect_consts(cs);
    for (const QueryLiteral& l : r.body) l.core.collect_consts(cs);
  }
  out.insert(cs.begin(), cs.end());
  return out;
}

EvalLimits default_limits_for(const Mcs& m) {
  long n = static_cast<long>(m.active_domain().size());
  EvalLimits limits;
  limits.max_rounds = static_cast<int>(std::max(1000l, 10l * n * n));
  return limits;
}

// ---------------------------------------------------------------------------
// Validation: well-formedness of bridge rules + stratification of the
// cross-context dependency graph (bridge rules plus context rules).

namespace {

struct DepNode {
  int ctx;
  Symbol pred;
  bool operator<(const DepNode& o) const {
    if (ctx != o.ctx) return ctx < o.ctx;
    return pred < o.pred;
  }
  bool operator==(const DepNode& o) const {
    return ctx == o.ctx && pred == o.pred;
  }
};

std::string node_name(const Mcs& m, const DepNode& n) {
  return m.ctx(n.ctx).name + ":" + std::string(n.pred.str());
}

// Predicates a body literal reads, paired with the sign of the dependency.
void literal_reads(const QueryLiteral& l,
                   std::vector<std::pair<DepNode, bool>>& out) {
  switch (l.core.kind) {
    case LiteralCore::Kind::Atom:
      out.push_back({{l.ctx, l.core.atom.pred()}, l.core.negated});
      break;
    case LiteralCore::Kind::Equality:
      out.push_back({{l.ctx, eq_pred()}, l.core.negated});
      break;
    case LiteralCore::Kind::AtMost:
      // counting is nonmonotone in the role and monotone-decreasing in
      // equality merges; both treated as negative dependencies
      out.push_back({{l.ctx, l.core.role}, true});
      out.push_back({{l.ctx, eq_pred()}, true});
      break;
  }
}

void check_bridge_safety(const Mcs& m, const BridgeRule& r) {
  std::set<Symbol> binding;
  for (const QueryLiteral& l : r.body) {
    std::vector<Symbol> vs;
    l.core.collect_binding_vars(vs);
    binding.insert(vs.begin(), vs.end());
  }
  auto require_bound = [&](const std::vector<Symbol>& vs,
                           const std::string& where) {
    for (Symbol v : vs)
      if (!binding.count(v))
        throw std::invalid_argument("unsafe bridge rule '" + r.render(m) +
                                    "': variable " + std::string(v.str()) +
                                    " in " + where +
                                    " does not occur in a positive body "
                                    "literal");
  };
  std::vector<Symbol> vs;
  r.arg.collect_vars(vs);
  require_bound(vs, "the head");
  for (const QueryLiteral& l : r.body) {
    if (!l.core.negated) continue;
    vs.clear();
    l.core.collect_vars(vs);
    require_bound(vs, "'" + l.core.render() + "'");
  }
}

}  // namespace

void Mcs::validate() const {
  std::set<std::string> names;
  for (const ManagedContext& c : contexts) {
    if (!names.insert(c.name).second)
      throw std::invalid_argument("duplicate context name '" + c.name + "'");
  }

  int n = static_cast<int>(contexts.size());
  for (const BridgeRule& r : bridges) {
    if (r.head_ctx < 0 || r.head_ctx >= n)
      throw std::invalid_argument("bridge rule head context out of range");
    for (const QueryLiteral& l : r.body)
      if (l.ctx < 0 || l.ctx >= n)
        throw std::invalid_argument("bridge rule body context out of range");
    const ManagedContext& hc = contexts[r.head_ctx];
    Symbol op = hc.logic->resolve_op(r.op);
    if (!hc.logic->op_is_plain_add(op) && !hc.op_names.count(op))
      throw std::invalid_argument(
          "bridge rule head operation '" + std::string(r.op.str()) +
          "' is not an operation of context " + hc.name);
    if (auto err = hc.logic->validate_op(op, r.arg, /*bridge_head=*/true))
      throw std::invalid_argument("bridge rule head: " + *err);
    check_bridge_safety(*this, r);
  }

  // ---- global predicate-level dependency graph
  std::vector<DepEdge> internal;
  for (int i = 0; i < n; ++i)
    contexts[i].logic->collect_dependencies(contexts[i].kb, i, internal);

  // predicate universe per context (for conservative head effects)
  std::map<int, std::set<Symbol>> preds;
  for (const DepEdge& e : internal) {
    preds[e.from_ctx].insert(e.from_pred);
    preds[e.to_ctx].insert(e.to_pred);
  }
  for (int i = 0; i < n; ++i) {
    std::set<Symbol> ps;
    contexts[i].logic->collect_predicates(contexts[i].kb, ps);
    preds[i].insert(ps.begin(), ps.end());
  }
  for (const BridgeRule& r : bridges) {
    for (const QueryLiteral& l : r.body) {
      std::vector<std::pair<DepNode, bool>> reads;
      literal_reads(l, reads);
      for (auto& [node, negv] : reads) {
        (void)negv;
        preds[node.ctx].insert(node.pred);
      }
    }
    const ManagedContext& hc = contexts[r.head_ctx];
    if (hc.logic->op_is_plain_add(hc.logic->resolve_op(r.op))) {
      if (r.arg.kind == OpArg::Kind::Atom)
        preds[r.head_ctx].insert(r.arg.atom.pred());
      else
        preds[r.head_ctx].insert(eq_pred());
    }
  }

  struct Edge {
    DepNode from, to;
    bool negative;
  };
  std::vector<Edge> edges;
  for (const DepEdge& e : internal)
    edges.push_back(
        {{e.from_ctx, e.from_pred}, {e.to_ctx, e.to_pred}, e.negative});

  for (const BridgeRule& r : bridges) {
    std::vector<std::pair<DepNode, bool>> reads;
    for (const QueryLiteral& l : r.body) literal_reads(l, reads);

    const ManagedContext& hc = contexts[r.head_ctx];
    Symbol op = hc.logic->resolve_op(r.op);
    bool plain_add = hc.logic->op_is_plain_add(op);
    std::vector<DepNode> targets;
    bool forced_negative = false;
    if (plain_add && r.arg.kind == OpArg::Kind::Atom) {
      targets.push_back({r.head_ctx, r.arg.atom.pred()});
    } else if (plain_add && r.arg.kind == OpArg::Kind::Equality) {
      targets.push_back({r.head_ctx, eq_pred()});
      // growing the equality relation affects membership of every
      // predicate of the context, monotonically
      for (Symbol p : preds[r.head_ctx])
        edges.push_back({{r.head_ctx, eq_pred()}, {r.head_ctx, p}, false});
    } else {
      // deletion or a compound operation: conservatively nonmonotone on
      // the whole head context
      forced_negative = true;
      for (Symbol p : preds[r.head_ctx]) targets.push_back({r.head_ctx, p});
      targets.push_back({r.head_ctx, eq_pred()});
    }
    for (const auto& [src, negv] : reads)
      for (const DepNode& t : targets)
        edges.push_back({src, t, negv || forced_negative});
  }

  // ---- SCC check: no cycle may contain a negative edge
  std::vector<DepNode> nodes;
  {
    std::set<DepNode> setnodes;
    for (const Edge& e : edges) {
      setnodes.insert(e.from);
      setnodes.insert(e.to);
    }
    nodes.assign(setnodes.begin(), setnodes.end());
  }
  std::map<DepNode, int> id;
  for (size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(nodes.size());
  for (const Edge& e : edges) adj[id[e.from]].push_back(id[e.to]);

  // Tarjan (iterative)
  std::vector<int> comp(nodes.size(), -1), low(nodes.size()), num(nodes.size(), -1);
  std::vector<int> stack;
  std::vector<bool> on_stack(nodes.size(), false);
  int counter = 0, ncomp = 0;
  for (size_t root = 0; root < nodes.size(); ++root) {
    if (num[root] != -1) continue;
    std::vector<std::pair<int, size_t>> call;
    call.push_back({static_cast<int>(root), 0});
    while (!call.empty()) {
      auto& [v, pi] = call.back();
      if (pi == 0) {
        num[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (pi < adj[v].size()) {
        int w = adj[v][pi++];
        if (num[w] == -1) {
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], num[w]);
        }
      } else {
        if (low[v] == num[v]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
        int child = v;
        call.pop_back();
        if (!call.empty())
          low[call.back().first] = std::min(low[call.back().first], low[child]);
      }
    }
  }

  for (const Edge& e : edges) {
    if (!e.negative) continue;
    if (comp[id[e.from]] == comp[id[e.to]]) {
      int c = comp[id[e.from]];
      std::vector<std::string> cycle;
      for (size_t i = 0; i < nodes.size(); ++i)
        if (comp[i] == c) cycle.push_back(node_name(*this, nodes[i]));
      std::sort(cycle.begin(), cycle.end());
      std::ostringstream os;
      os << "bridge rules are not stratified: negative dependency from "
         << node_name(*this, e.from) << " to " << node_name(*this, e.to)
         << " inside the cycle {";
      for (size_t i = 0; i < cycle.size(); ++i)
        os << (i ? ", " : "") << cycle[i];
      os << "}";
      throw StratificationError(os.str());
    }
  }
}

bool Mcs::structurally_equal(const Mcs& o) const {
  if (contexts.size() != o.contexts.size() ||
      bridges.size() != o.bridges.size())
    return false;
  for (size_t i = 0; i < contexts.size(); ++i) {
    const ManagedContext &a = contexts[i], &b = o.contexts[i];
    if (a.name != b.name || a.op_names != b.op_names ||
        a.import_domain != b.import_domain)
      return false;
    if (!a.logic->kb_equal(a.kb, b.kb)) return false;
  }
  for (size_t i = 0; i < bridges.size(); ++i)
    if (bridges[i].render(*this) != o.bridges[i].render(o)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Grounding and satisfaction

std::optional<BeliefSet> accept(const ManagedContext& ctx,
                                const EvalLimits& limits) {
  return ctx.logic->accept(ctx.kb, limits);
}

bool literal_holds(const QueryLiteral& lit, const BeliefState& s) {
  assert(lit.core.ground());
  const BeliefSet& bs = s.at(lit.ctx);
  bool v = false;
  switch (lit.core.kind) {
    case LiteralCore::Kind::Atom:
      v = bs.contains(lit.core.atom);
      break;
    case LiteralCore::Kind::Equality:
      v = bs.equal(lit.core.lhs.sym(), lit.core.rhs.sym());
      break;
    case LiteralCore::Kind::AtMost:
      v = eval_count_at_most(bs, lit.core.bound, lit.core.role,
                             lit.core.subject.sym());
      break;
  }
  return lit.core.negated ? !v : v;
}

namespace {

// Enumerates bindings over `domain` for the given variables, with the
// body literals already bound checked as filters.
void ground_rule_body(const std::vector<QueryLiteral>& body,
                      const BeliefState& s, const std::set<Symbol>& domain,
                      const std::function<void(const Bindings&)>& sink) {
  std::vector<Symbol> vars;
  {
    std::vector<Symbol> vs;
    for (const QueryLiteral& l : body) l.core.collect_vars(vs);
    std::set<Symbol> uniq(vs.begin(), vs.end());
    vars.assign(uniq.begin(), uniq.end());
  }

  // join plan: positive atom literals first, then everything else
  std::vector<const QueryLiteral*> joins, rest;
  for (const QueryLiteral& l : body) {
    if (l.core.kind == LiteralCore::Kind::Atom && !l.core.negated)
      joins.push_back(&l);
    else
      rest.push_back(&l);
  }

  Bindings b;
  std::vector<Symbol> trail;

  std::function<void()> finish = [&]() {
    for (const QueryLiteral* l : rest) {
      QueryLiteral g{l->ctx, l->core.substituted(b)};
      if (!g.core.ground()) return;  // deferred to domain enumeration
      if (!literal_holds(g, s)) return;
    }
    sink(b);
  };

  // enumerate any variables still unbound after the joins over the domain
  std::function<void()> enumerate_free = [&]() {
    std::vector<Symbol> free;
    for (Symbol v : vars)
      if (!b.count(v)) free.push_back(v);
    if (free.empty()) {
      finish();
      return;
    }
    std::function<void(size_t)> go = [&](size_t i) {
      if (i == free.size()) {
        finish();
        return;
      }
      for (Symbol c : domain) {
        b[free[i]] = c;
        go(i + 1);
      }
      b.erase(free[i]);
    };
    go(0);
  };

  std::function<void(size_t)> step = [&](size_t i) {
    if (i == joins.size()) {
      // import-domain restriction applies to every variable
      for (const auto& [v, c] : b) {
        (void)v;
        if (!domain.count(c)) return;
      }
      enumerate_free();
      return;
    }
    const QueryLiteral& l = *joins[i];
    const BeliefSet& bs = s.at(l.ctx);
    size_t mark = trail.size();
    for (const Atom& fact : bs.atoms()) {
      if (match_atom(l.core.atom, fact, bs.eq(), b, trail)) {
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

std::vector<BridgeRule> ground_bridge_instances(const Mcs& m,
                                                const BeliefState& s) {
  assert(s.size() == m.size());
  std::set<Symbol> full_domain = m.active_domain();
  std::vector<BridgeRule> out;
  std::set<std::string> seen;
  for (const BridgeRule& r : m.bridges) {
    const auto& imp = m.ctx(r.head_ctx).import_domain;
    const std::set<Symbol>& domain = imp ? *imp : full_domain;
    ground_rule_body(r.body, s, domain, [&](const Bindings& b) {
      BridgeRule g;
      g.head_ctx = r.head_ctx;
      g.op = r.op;
      g.arg = r.arg.substituted(b);
      for (const QueryLiteral& l : r.body)
        g.body.emplace_back(l.ctx, l.core.substituted(b));
      std::string key = g.render(m);
      if (seen.insert(key).second) out.push_back(std::move(g));
    });
  }
  std::sort(out.begin(), out.end(),
            [&](const BridgeRule& a, const BridgeRule& b) {
              return a.render(m) < b.render(m);
            });
  return out;
}

// ---------------------------------------------------------------------------
// Equilibrium

namespace {

std::optional<BeliefState> initial_state(const Mcs& m) {
  BeliefState s;
  s.reserve(m.size());
  for (const ManagedContext& c : m.contexts) {
    auto bs = accept(c, m.limits);
    if (!bs) return std::nullopt;
    s.push_back(std::move(*bs));
  }
  return s;
}

std::optional<BeliefState> next_state(const Mcs& m, const BeliefState& s) {
  std::vector<BridgeRule> instances = ground_bridge_instances(m, s);
  std::vector<std::vector<GroundOp>> per_ctx(m.size());
  for (const BridgeRule& r : instances)
    per_ctx[r.head_ctx].push_back(GroundOp{r.op, r.arg});
  BeliefState next;
  next.reserve(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    auto& heads = per_ctx[i];
    std::sort(heads.begin(), heads.end());
    heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
    const ManagedContext& c = m.contexts[i];
    // management heads are applied to a scratch copy; the persistent kb
    // is only changed by update actions
    KbPtr scratch = c.logic->apply(c.kb, heads);
    auto bs = c.logic->accept(scratch, m.limits);
    if (!bs) return std::nullopt;
    next.push_back(std::move(*bs));
  }
  return next;
}

}  // namespace

namespace {

std::optional<BeliefState> equilibrium_loop(const Mcs& m,
                                            std::vector<BeliefState>* trace) {
  if (m.contexts.empty()) return BeliefState{};
  auto s = initial_state(m);
  if (!s) return std::nullopt;
  if (trace) trace->push_back(*s);
  for (int round = 0; round < m.limits.max_rounds; ++round) {
    auto next = next_state(m, *s);
    if (!next) return std::nullopt;
    if (trace) trace->push_back(*next);
    if (*next == *s) return s;
    s = std::move(next);
  }
  return std::nullopt;  // bound exhausted without stabilizing
}

}  // namespace

std::optional<BeliefState> compute_equilibrium_trace(
    const Mcs& m, std::vector<BeliefState>* trace) {
  m.validate();
  return equilibrium_loop(m, trace);
}

std::optional<BeliefState> compute_equilibrium(const Mcs& m) {
  m.validate();
  return equilibrium_loop(m, nullptr);
}

std::optional<BeliefState> compute_equilibrium_prevalidated(const Mcs& m) {
  return equilibrium_loop(m, nullptr);
}

bool is_logically_consistent(const Mcs& m) {
  return compute_equilibrium(m).has_value();
}

bool is_equilibrium(const Mcs& m, const BeliefState& s) {
  if (s.size() != m.size()) return false;
  auto next = next_state(m, s);
  return next && *next == s;
}

}  // namespace mcsr
