#ifndef MCSR_REPAIR_HPP
#define MCSR_REPAIR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcsr/aic.hpp"

namespace mcsr {

struct RepairNode {
  UpdateSet actions;
  std::string id;  // stable content hash of the sorted action set
  bool consistent = true;
  bool leaf = false;
  bool weak_repair = false;
  bool grounded_repair = false;
  // non-empty on inconsistent nodes: why the node is not expanded
  std::string reason;
};

struct RepairEdge {
  int from = 0;
  int to = 0;
  std::string rule;  // label of the violated ground AIC
};

// Nodes form a DAG: children reached through different rules with the
// same action set are merged. The root is node 0.
struct RepairTree {
  std::vector<RepairNode> nodes;
  std::vector<RepairEdge> edges;

  const RepairNode& root() const { return nodes.front(); }
  std::vector<const RepairNode*> leaves() const;
  std::vector<UpdateSet> grounded_repairs() const;  // sorted
};

// Builds the full repair tree: root is the empty set; every consistent
// node violating some ground instance r gets one child per minimal head
// subset of r that restores r. Inconsistent nodes (logically inconsistent
// variants, operation failures, update sets inconsistent with the parent
// variant) are retained as leaves but not expanded.
RepairTree build_repair_tree(const Mcs& m, const std::vector<Aic>& aics);

// Grounded repairs: repair-tree leaves that pass is_grounded_repair,
// deduplicated as sets and sorted.
std::vector<UpdateSet> enumerate_grounded_repairs(const Mcs& m,
                                                  const std::vector<Aic>& aics);

// Independent brute-force oracle: enumerates every subset of the ground
// head-action universe and keeps the consistent weak repairs that pass
// is_grounded_repair. Throws BoundError when the universe exceeds 16
// actions.
std::vector<UpdateSet> oracle_grounded_repairs(const Mcs& m,
                                               const std::vector<Aic>& aics);

// The ground head-action universe the oracle enumerates.
std::vector<UpdateAction> ground_action_universe(const Mcs& m,
                                                 const std::vector<Aic>& aics);

}  // namespace mcsr

#endif
