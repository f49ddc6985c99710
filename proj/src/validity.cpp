#include "mcsr/validity.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "mcsr/deductive.hpp"

namespace mcsr {

std::string verdict_name(ValidityVerdict v) {
  switch (v) {
    case ValidityVerdict::Valid:
      return "valid";
    case ValidityVerdict::CounterexampleCondition1:
      return "counterexample-condition1";
    case ValidityVerdict::CounterexampleCondition2:
      return "counterexample-condition2";
    case ValidityVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

// Renders a variant by the kbs that differ from the base system.
std::string render_variant(const Mcs& base, const Mcs& variant) {
  std::ostringstream os;
  bool any = false;
  for (size_t i = 0; i < base.size(); ++i) {
    const ManagedContext& b = base.ctx(i);
    const ManagedContext& v = variant.ctx(i);
    if (b.logic->kb_equal(b.kb, v.kb)) continue;
    if (any) os << "; ";
    os << b.name << " = " << v.logic->render_kb(v.kb);
    any = true;
  }
  if (!any) os << "unchanged";
  return os.str();
}

struct Variant {
  UpdateSet set;
  Mcs mcs;
  std::optional<BeliefState> eq;
};

}  // namespace

std::vector<UniverseAtom> default_validity_universe(
    const Mcs& m, const std::vector<Aic>& aics) {
  std::set<Symbol> domain = active_domain(m, aics);

  // predicates associated with each context, with arities from occurrences
  std::map<int, std::map<Symbol, size_t>> preds;
  auto note_atom = [&](int ctx, const Atom& a) {
    preds[ctx].emplace(a.pred(), a.arity());
  };
  for (size_t i = 0; i < m.size(); ++i) {
    const auto* dkb = dynamic_cast<const DeductiveKb*>(m.ctx(i).kb.get());
    if (!dkb) continue;
    for (const Atom& a : dkb->facts) note_atom(static_cast<int>(i), a);
    for (const HornRule& r : dkb->program->rules()) {
      note_atom(static_cast<int>(i), r.head);
      for (const LiteralCore& l : r.body)
        if (l.kind == LiteralCore::Kind::Atom)
          note_atom(static_cast<int>(i), l.atom);
    }
  }
  for (const BridgeRule& r : m.bridges) {
    if (r.arg.kind == OpArg::Kind::Atom) note_atom(r.head_ctx, r.arg.atom);
    for (const QueryLiteral& l : r.body)
      if (l.core.kind == LiteralCore::Kind::Atom)
        note_atom(l.ctx, l.core.atom);
  }
  for (const Aic& aic : aics) {
    for (const QueryLiteral& l : aic.body)
      if (l.core.kind == LiteralCore::Kind::Atom)
        note_atom(l.ctx, l.core.atom);
    for (const UpdateAction& a : aic.head)
      if (a.arg.kind == OpArg::Kind::Atom ||
          a.arg.kind == OpArg::Kind::NegAtom)
        note_atom(a.ctx, a.arg.atom);
  }

  std::vector<UniverseAtom> universe;
  for (const auto& [ctxi, ps] : preds) {
    const ManagedContext& c = m.ctx(ctxi);
    Symbol add = c.logic->resolve_op(ops::add());
    Symbol del = c.logic->resolve_op(ops::del());
    if (!c.op_names.count(add) && !c.op_names.count(del)) continue;
    for (const auto& [pred, arity] : ps) {
      // enumerate all ground tuples over the active domain
      std::vector<Symbol> tuple(arity);
      std::function<void(size_t)> go = [&](size_t k) {
        if (k == arity) {
          std::vector<Term> args;
          for (Symbol s : tuple) args.push_back(Term::constant(s));
          universe.push_back({ctxi, Atom(pred, args)});
          return;
        }
        for (Symbol s : domain) {
          tuple[k] = s;
          go(k + 1);
        }
      };
      go(0);
    }
  }
  std::sort(universe.begin(), universe.end());
  return universe;
}

ValidityReport bounded_validity_check(const Mcs& m, const Aic& r,
                                      const std::vector<UniverseAtom>& universe,
                                      int bound) {
  m.validate();
  validate_aics(m, {r});

  ValidityReport report;
  report.exhaustive = bound >= static_cast<int>(universe.size());

  // ---- enumerate variants: per universe atom, {leave, add, del}
  std::vector<UniverseAtom> atoms(universe.begin(), universe.end());
  std::sort(atoms.begin(), atoms.end());

  std::vector<Variant> variants;
  {
    std::vector<UpdateAction> picked;
    std::function<void(size_t)> go = [&](size_t i) {
      if (static_cast<int>(picked.size()) > bound) return;
      if (i == atoms.size()) {
        UpdateSet u(picked);
        Mcs variant = m;
        auto slices = u.per_context(m.size());
        for (size_t k = 0; k < m.size(); ++k) {
          if (slices[k].empty()) continue;
          std::sort(slices[k].begin(), slices[k].end());
          variant.contexts[k].kb =
              m.ctx(k).logic->apply(m.ctx(k).kb, slices[k]);
        }
        variants.push_back(
            {u, variant, compute_equilibrium_prevalidated(variant)});
        return;
      }
      const UniverseAtom& ua = atoms[i];
      const ManagedContext& c = m.ctx(ua.ctx);
      go(i + 1);  // leave
      Symbol add = c.logic->resolve_op(ops::add());
      Symbol del = c.logic->resolve_op(ops::del());
      if (c.op_names.count(add)) {
        picked.push_back({ua.ctx, add, OpArg::make_atom(ua.atom)});
        go(i + 1);
        picked.pop_back();
      }
      if (c.op_names.count(del)) {
        picked.push_back({ua.ctx, del, OpArg::make_atom(ua.atom)});
        go(i + 1);
        picked.pop_back();
      }
    };
    go(0);
  }
  // deterministic order: smallest update sets first, then by rendering;
  // deduplicate variants that produce the same kbs
  std::stable_sort(variants.begin(), variants.end(),
                   [&](const Variant& a, const Variant& b) {
                     if (a.set.size() != b.set.size())
                       return a.set.size() < b.set.size();
                     return a.set.render(m) < b.set.render(m);
                   });
  {
    std::set<std::string> seen;
    std::vector<Variant> uniq;
    for (Variant& v : variants) {
      std::string key;
      for (size_t i = 0; i < v.mcs.size(); ++i)
        key += v.mcs.ctx(i).logic->render_kb(v.mcs.ctx(i).kb) + "|";
      if (seen.insert(key).second) uniq.push_back(std::move(v));
    }
    variants = std::move(uniq);
  }

  // ---- check every ground instance of r
  for (const GroundAic& g : ground_aics(m, {r})) {
    InstanceValidity inst;
    inst.label = g.label;

    std::vector<const Variant*> violating;
    for (const Variant& v : variants)
      if (v.eq && !satisfies_state(*v.eq, g)) violating.push_back(&v);

    // condition 1: every violating variant repaired by some head subset
    for (const Variant* v : violating) {
      bool repaired = false;
      uint32_t count = uint32_t{1} << g.head.size();
      for (uint32_t mask = 1; mask < count && !repaired; ++mask) {
        std::vector<UpdateAction> sub;
        for (size_t i = 0; i < g.head.size(); ++i)
          if (mask & (uint32_t{1} << i)) sub.push_back(g.head[i]);
        UpdateSet u(std::move(sub));
        try {
          if (!is_consistent_update_set(v->mcs, u,
                                        std::max<int>(8, (int)u.size())))
            continue;
        } catch (const OperationError&) {
          continue;
        }
        Mcs repaired_mcs = v->mcs;
        auto slices = u.per_context(m.size());
        for (size_t k = 0; k < m.size(); ++k) {
          if (slices[k].empty()) continue;
          std::sort(slices[k].begin(), slices[k].end());
          repaired_mcs.contexts[k].kb =
              v->mcs.ctx(k).logic->apply(v->mcs.ctx(k).kb, slices[k]);
        }
        auto eq2 = compute_equilibrium_prevalidated(repaired_mcs);
        if (eq2 && satisfies_state(*eq2, g)) repaired = true;
      }
      if (!repaired) {
        inst.verdict = ValidityVerdict::CounterexampleCondition1;
        inst.unrepairable_variant = render_variant(m, v->mcs);
        break;
      }
    }

    // condition 2: every head action repairs some violating variant
    if (inst.verdict == ValidityVerdict::Valid) {
      for (const UpdateAction& a : g.head) {
        std::optional<std::string> witness;
        for (const Variant* v : violating) {
          UpdateSet u(std::vector<UpdateAction>{a});
          Mcs repaired_mcs = v->mcs;
          auto slices = u.per_context(m.size());
          for (size_t k = 0; k < m.size(); ++k) {
            if (slices[k].empty()) continue;
            repaired_mcs.contexts[k].kb =
                v->mcs.ctx(k).logic->apply(v->mcs.ctx(k).kb, slices[k]);
          }
          auto eq2 = compute_equilibrium_prevalidated(repaired_mcs);
          if (eq2 && satisfies_state(*eq2, g)) {
            witness = render_variant(m, v->mcs);
            break;
          }
        }
        if (witness) {
          inst.witnesses.emplace_back(a.render(m), *witness);
        } else if (report.exhaustive) {
          inst.verdict = ValidityVerdict::CounterexampleCondition2;
          inst.useless_action = a.render(m);
          break;
        } else {
          inst.verdict = ValidityVerdict::Inconclusive;
          inst.useless_action = a.render(m);
          break;
        }
      }
    }

    report.instances.push_back(std::move(inst));
  }

  // aggregate: a counterexample dominates, then inconclusive
  for (const InstanceValidity& inst : report.instances) {
    if (inst.verdict == ValidityVerdict::CounterexampleCondition1 ||
        inst.verdict == ValidityVerdict::CounterexampleCondition2) {
      report.verdict = inst.verdict;
      return report;
    }
    if (inst.verdict == ValidityVerdict::Inconclusive)
      report.verdict = ValidityVerdict::Inconclusive;
  }
  return report;
}

}  // namespace mcsr
