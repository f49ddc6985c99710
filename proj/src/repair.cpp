#include "mcsr/repair.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>

namespace mcsr {

namespace {

std::string node_id_for(const Mcs& m, const UpdateSet& u) {
  uint64_t h = fnv1a(u.render(m));
  std::ostringstream os;
  os << std::hex;
  for (int i = 15; i >= 0; --i) os << ((h >> (i * 4)) & 0xf);
  return os.str();
}

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

// Shared evaluation state for one repair computation: caches variants,
// equilibria and base-relative consistency by node label.
class Engine {
 public:
  Engine(const Mcs& m, const std::vector<Aic>& aics) : m_(m) {
    m_.validate();
    validate_aics(m_, aics);
    ground_ = ground_aics(m_, aics);
  }

  const Mcs& base() const { return m_; }
  const std::vector<GroundAic>& ground() const { return ground_; }

  bool consistent_with_base(const UpdateSet& u) {
    auto it = base_consistency_.find(u);
    if (it != base_consistency_.end()) return it->second;
    bool ok;
    try {
      ok = is_consistent_update_set(m_, u,
                                    std::max<int>(8, (int)u.size()));
    } catch (const OperationError&) {
      ok = false;
    }
    base_consistency_.emplace(u, ok);
    return ok;
  }

  const Mcs& variant(const UpdateSet& u) {
    auto it = variants_.find(u);
    if (it == variants_.end())
      it = variants_.emplace(u, apply_unchecked(m_, u)).first;
    return it->second;
  }

  const std::optional<BeliefState>& equilibrium(const UpdateSet& u) {
    auto it = equilibria_.find(u);
    if (it == equilibria_.end()) {
      it = equilibria_
               .emplace(u, compute_equilibrium_prevalidated(variant(u)))
               .first;
    }
    return it->second;
  }

  std::vector<const GroundAic*> violated(const BeliefState& s) {
    std::vector<const GroundAic*> out;
    for (const GroundAic& g : ground_)
      if (!satisfies_state(s, g)) out.push_back(&g);
    return out;
  }

 private:
  Mcs m_;
  std::vector<GroundAic> ground_;
  std::map<UpdateSet, bool> base_consistency_;
  std::map<UpdateSet, Mcs> variants_;
  std::map<UpdateSet, std::optional<BeliefState>> equilibria_;
};

}  // namespace

std::vector<const RepairNode*> RepairTree::leaves() const {
  std::vector<bool> has_child(nodes.size(), false);
  for (const RepairEdge& e : edges) has_child[e.from] = true;
  std::vector<const RepairNode*> out;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (!has_child[i]) out.push_back(&nodes[i]);
  return out;
}

std::vector<UpdateSet> RepairTree::grounded_repairs() const {
  std::vector<UpdateSet> out;
  for (const RepairNode& n : nodes)
    if (n.grounded_repair) out.push_back(n.actions);
  std::sort(out.begin(), out.end());
  return out;
}

RepairTree build_repair_tree(const Mcs& m, const std::vector<Aic>& aics) {
  Engine engine(m, aics);
  RepairTree tree;
  std::map<UpdateSet, int> index;
  std::deque<int> worklist;
  std::set<std::pair<int, std::string>> edge_keys;  // (from, rule+to)

  auto add_node = [&](const UpdateSet& u) -> int {
    auto it = index.find(u);
    if (it != index.end()) return it->second;
    RepairNode n;
    n.actions = u;
    n.id = node_id_for(engine.base(), u);
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(n));
    index.emplace(u, id);
    return id;
  };

  auto add_edge = [&](int from, int to, const std::string& rule) {
    if (edge_keys.insert({from, rule + "->" + std::to_string(to)}).second)
      tree.edges.push_back({from, to, rule});
  };

  // expanded[i]: node i has been through the expansion step
  std::vector<bool> expanded;

  int root = add_node(UpdateSet{});
  worklist.push_back(root);

  while (!worklist.empty()) {
    int ni = worklist.front();
    worklist.pop_front();
    if (static_cast<size_t>(ni) >= expanded.size())
      expanded.resize(tree.nodes.size(), false);
    if (expanded[ni]) continue;
    expanded[ni] = true;

    UpdateSet label = tree.nodes[ni].actions;

    if (!tree.nodes[ni].consistent) continue;  // retained, not expanded

    if (!engine.consistent_with_base(label)) {
      tree.nodes[ni].consistent = false;
      tree.nodes[ni].leaf = true;
      tree.nodes[ni].reason = "update set inconsistent";
      continue;
    }
    const auto& eq = engine.equilibrium(label);
    if (!eq) {
      tree.nodes[ni].consistent = false;
      tree.nodes[ni].leaf = true;
      tree.nodes[ni].reason = "logically inconsistent";
      continue;
    }

    auto violated = engine.violated(*eq);
    if (violated.empty()) {
      tree.nodes[ni].leaf = true;
      tree.nodes[ni].weak_repair = true;
      continue;
    }

    bool any_child = false;
    const Mcs& parent_variant = engine.variant(label);

    for (const GroundAic* g : violated) {
      // candidate extensions: nonempty subsets of head(g), smallest first
      size_t k = g->head.size();
      assert(k <= 20);
      std::vector<uint32_t> masks;
      for (uint32_t mask = 1; mask < (uint32_t{1} << k); ++mask)
        masks.push_back(mask);
      std::sort(masks.begin(), masks.end(), [&](uint32_t a, uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
      });

      enum class Status { Unsat, Sat, Incons };
      std::map<uint32_t, Status> status;
      auto subset_of_mask = [&](uint32_t sub, uint32_t sup) {
        return (sub & sup) == sub && sub != sup;
      };

      for (uint32_t mask : masks) {
        std::vector<UpdateAction> add;
        for (size_t i = 0; i < k; ++i)
          if (mask & (1u << i)) add.push_back(g->head[i]);
        UpdateSet child_label = label.union_with(UpdateSet(std::move(add)));
        if (child_label == label) {
          status[mask] = Status::Unsat;  // no extension: still violated
          continue;
        }
        Status st;
        if (!engine.consistent_with_base(child_label)) {
          st = Status::Incons;
        } else {
          const auto& ceq = engine.equilibrium(child_label);
          if (!ceq)
            st = Status::Incons;
          else
            st = satisfies_state(*ceq, *g) ? Status::Sat : Status::Unsat;
        }
        status[mask] = st;

        if (st == Status::Sat) {
          // minimality: no proper subset of the added actions restores g
          bool minimal = true;
          for (uint32_t sub = 1; sub < mask; ++sub) {
            if (!subset_of_mask(sub, mask)) continue;
            if (status.count(sub) && status[sub] == Status::Sat) {
              minimal = false;
              break;
            }
          }
          if (!minimal) continue;
          int ci = add_node(child_label);
          // node consistency condition (ii): the child's action set must
          // be consistent w.r.t. the parent's variant
          bool ok_vs_parent;
          try {
            ok_vs_parent = is_consistent_update_set(
                parent_variant, child_label,
                std::max<int>(8, (int)child_label.size()));
          } catch (const OperationError&) {
            ok_vs_parent = false;
          }
          if (static_cast<size_t>(ci) >= expanded.size())
            expanded.resize(tree.nodes.size(), false);
          if (!ok_vs_parent && tree.nodes[ci].reason.empty() &&
              !tree.nodes[ci].leaf) {
            tree.nodes[ci].consistent = false;
            tree.nodes[ci].leaf = true;
            tree.nodes[ci].reason =
                "update set inconsistent w.r.t. parent variant";
          } else if (ok_vs_parent &&
                     tree.nodes[ci].reason ==
                         "update set inconsistent w.r.t. parent variant") {
            // consistent with this parent: the node is expandable after all
            tree.nodes[ci].consistent = true;
            tree.nodes[ci].leaf = false;
            tree.nodes[ci].reason.clear();
            expanded[ci] = false;
          }
          add_edge(ni, ci, g->label);
          any_child = true;
          if (!expanded[ci] && tree.nodes[ci].consistent)
            worklist.push_back(ci);
        } else if (st == Status::Incons) {
          // retained as an inconsistent leaf when minimal among the
          // candidates tried so far
          bool minimal = true;
          for (uint32_t sub = 1; sub < mask; ++sub) {
            if (!subset_of_mask(sub, mask)) continue;
            auto it = status.find(sub);
            if (it != status.end() && it->second != Status::Unsat) {
              minimal = false;
              break;
            }
          }
          if (!minimal) continue;
          int ci = add_node(child_label);
          if (!tree.nodes[ci].leaf && tree.nodes[ci].reason.empty() &&
              tree.nodes[ci].actions.size() > label.size()) {
            tree.nodes[ci].consistent = false;
            tree.nodes[ci].leaf = true;
            tree.nodes[ci].reason =
                engine.consistent_with_base(child_label)
                    ? "logically inconsistent"
                    : "update set inconsistent";
            if (static_cast<size_t>(ci) >= expanded.size())
              expanded.resize(tree.nodes.size(), false);
            expanded[ci] = true;
          }
          add_edge(ni, ci, g->label);
          any_child = true;
        }
      }
    }

    if (!any_child) tree.nodes[ni].leaf = true;
  }

  // post-filter: grounded repairs among the weak-repair leaves
  for (RepairNode& n : tree.nodes) {
    if (n.leaf && n.weak_repair && n.consistent)
      n.grounded_repair =
          is_grounded_repair(engine.base(), aics, n.actions);
  }
  return tree;
}

std::vector<UpdateSet> enumerate_grounded_repairs(const Mcs& m,
                                                  const std::vector<Aic>& aics) {
  return build_repair_tree(m, aics).grounded_repairs();
}

std::vector<UpdateAction> ground_action_universe(const Mcs& m,
                                                 const std::vector<Aic>& aics) {
  std::vector<UpdateAction> universe;
  for (const GroundAic& g : ground_aics(m, aics))
    for (const UpdateAction& a : g.head) universe.push_back(a);
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()),
                 universe.end());
  return universe;
}

std::vector<UpdateSet> oracle_grounded_repairs(const Mcs& m,
                                               const std::vector<Aic>& aics) {
  Engine engine(m, aics);
  std::vector<UpdateAction> universe =
      ground_action_universe(engine.base(), aics);
  if (universe.size() > 16)
    throw BoundError("oracle action universe exceeds 16 actions (" +
                     std::to_string(universe.size()) + ")");

  std::vector<UpdateSet> repairs;
  uint32_t count = uint32_t{1} << universe.size();
  for (uint32_t mask = 0; mask < count; ++mask) {
    std::vector<UpdateAction> actions;
    for (size_t i = 0; i < universe.size(); ++i)
      if (mask & (uint32_t{1} << i)) actions.push_back(universe[i]);
    UpdateSet u(std::move(actions));
    if (!engine.consistent_with_base(u)) continue;
    const auto& eq = engine.equilibrium(u);
    if (!eq) continue;
    bool weak = true;
    for (const GroundAic& g : engine.ground())
      if (!satisfies_state(*eq, g)) {
        weak = false;
        break;
      }
    if (!weak) continue;
    if (is_grounded_repair(engine.base(), aics, u)) repairs.push_back(u);
  }
  std::sort(repairs.begin(), repairs.end());
  return repairs;
}

}  // namespace mcsr
