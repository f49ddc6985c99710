#ifndef MCSR_AIC_HPP
#define MCSR_AIC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcsr/kernel.hpp"

namespace mcsr {

class BoundError : public std::runtime_error {
 public:
  explicit BoundError(const std::string& what) : std::runtime_error(what) {}
};

class LogicallyInconsistentError : public std::runtime_error {
 public:
  explicit LogicallyInconsistentError(const std::string& what)
      : std::runtime_error(what) {}
};

// A ground update action: operation application in one context.
struct UpdateAction {
  int ctx = 0;
  Symbol op;
  OpArg arg;

  std::string render(const Mcs& m) const;
  GroundOp ground_op() const { return GroundOp{op, arg}; }

  bool operator==(const UpdateAction& o) const {
    return ctx == o.ctx && op == o.op && arg == o.arg;
  }
  bool operator<(const UpdateAction& o) const;
};

// Active integrity constraint: denial body plus suggested update actions.
// Head actions may contain variables bound by positive body literals.
struct Aic {
  std::string name;
  std::vector<QueryLiteral> body;
  std::vector<UpdateAction> head;

  std::string render(const Mcs& m) const;
};

// A fully instantiated AIC.
struct GroundAic {
  std::string label;  // source AIC name, plus bindings when non-ground
  std::vector<QueryLiteral> body;
  std::vector<UpdateAction> head;
  std::string rendered;  // expansion order is lexicographic on this
};

// A finite set of ground update actions, kept sorted and deduplicated.
class UpdateSet {
 public:
  UpdateSet() = default;
  explicit UpdateSet(std::vector<UpdateAction> actions);

  const std::vector<UpdateAction>& actions() const { return actions_; }
  size_t size() const { return actions_.size(); }
  bool empty() const { return actions_.empty(); }
  bool contains(const UpdateAction& a) const;
  bool subset_of(const UpdateSet& o) const;

  UpdateSet with(const UpdateAction& a) const;
  UpdateSet union_with(const UpdateSet& o) const;
  UpdateSet minus(const UpdateSet& o) const;

  // Actions affecting each context, as ground operations.
  std::vector<std::vector<GroundOp>> per_context(size_t n_contexts) const;

  std::string render(const Mcs& m) const;  // "{A:del(B1(a)), ...}"

  bool operator==(const UpdateSet& o) const { return actions_ == o.actions_; }
  bool operator!=(const UpdateSet& o) const { return !(*this == o); }
  bool operator<(const UpdateSet& o) const { return actions_ < o.actions_; }

 private:
  std::vector<UpdateAction> actions_;
};

// Validates AICs against the system: context ranges, safety, head
// operations declared by their contexts, argument shapes, and global
// predicate arity consistency. Throws std::invalid_argument.
void validate_aics(const Mcs& m, const std::vector<Aic>& aics);

// Union of the system's active domain and the constants in AIC bodies and
// heads: the grounding universe for AICs.
std::set<Symbol> active_domain(const Mcs& m, const std::vector<Aic>& aics);

// All ground instances over the active domain, sorted by rendered text.
std::vector<GroundAic> ground_aics(const Mcs& m, const std::vector<Aic>& aics);

// Constraint satisfaction in a fixed belief state: satisfied unless every
// body literal holds.
bool satisfies_state(const BeliefState& s, const GroundAic& r);

// Spec-level satisfaction: computes the equilibrium of m. Throws
// LogicallyInconsistentError when m has none.
bool satisfies(const Mcs& m, const GroundAic& r);

// Permutation-independence of each per-context slice of u with respect to
// the corresponding kb: every application order yields the kb produced by
// the one-shot management call. Throws BoundError when a slice exceeds
// max_per_context.
bool is_consistent_update_set(const Mcs& m, const UpdateSet& u,
                              int max_per_context = 8);

// U(M): applies each per-context slice through the management function.
// Throws OperationError when u is not a consistent update set.
Mcs apply_update_set(const Mcs& m, const UpdateSet& u);

bool is_weak_repair(const Mcs& m, const std::vector<Aic>& aics,
                    const UpdateSet& u);

// Grounded repair test: u is a weak repair and every proper subset V
// leaves some ground instance r violated with head(r) intersecting the
// remaining actions. V with no defined or consistent result state counts
// as violating r. Throws BoundError when |u| > 16.
bool is_grounded_repair(const Mcs& m, const std::vector<Aic>& aics,
                        const UpdateSet& u);

}  // namespace mcsr

#endif
