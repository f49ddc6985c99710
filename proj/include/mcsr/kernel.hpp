#ifndef MCSR_KERNEL_HPP
#define MCSR_KERNEL_HPP

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcsr/belief.hpp"
#include "mcsr/literal.hpp"
#include "mcsr/symbols.hpp"

namespace mcsr {

struct EvalLimits {
  // Fixpoint rounds allowed before a computation is declared divergent,
  // both for context logics and for the equilibrium iteration.
  int max_rounds = 1000;
};

class StratificationError : public std::runtime_error {
 public:
  explicit StratificationError(const std::string& what)
      : std::runtime_error(what) {}
};

class OperationError : public std::runtime_error {
 public:
  explicit OperationError(const std::string& what)
      : std::runtime_error(what) {}
};

// A ground management operation application: op name plus argument.
struct GroundOp {
  Symbol op;
  OpArg arg;

  std::string render() const {
    return std::string(op.str()) + "(" + arg.render() + ")";
  }
  bool operator==(const GroundOp& o) const {
    return op == o.op && arg == o.arg;
  }
  bool operator<(const GroundOp& o) const {
    if (op != o.op) return op.str() < o.op.str();
    return arg < o.arg;
  }
};

// Opaque per-logic knowledge base.
class KbValue {
 public:
  virtual ~KbValue() = default;
};
using KbPtr = std::shared_ptr<const KbValue>;

// Predicate-level dependency edge used for stratification. The pseudo
// predicate "=" stands for the equality relation of the context.
struct DepEdge {
  int from_ctx;
  Symbol from_pred;
  int to_ctx;
  Symbol to_pred;
  bool negative;
};

// A context logic: the accepted-belief-set function plus the management
// function. Knowledge bases are immutable values; apply returns a new kb.
// Semantic failures (operations whose application would make the kb
// inconsistent) yield a kb whose accept() has no accepted belief set.
class Logic {
 public:
  virtual ~Logic() = default;

  // ACC. Returns the unique accepted belief set, or nullopt when the
  // computation diverges at the iteration bound or the kb is inconsistent.
  virtual std::optional<BeliefSet> accept(const KbPtr& kb,
                                          const EvalLimits& limits) const = 0;

  // mng: one-shot application of a set of operations (given in canonical
  // order). Throws std::invalid_argument for malformed requests (unknown
  // operation, non-ground argument).
  virtual KbPtr apply(const KbPtr& kb,
                      std::span<const GroundOp> ops) const = 0;

  virtual bool kb_equal(const KbPtr& a, const KbPtr& b) const = 0;
  virtual size_t kb_fingerprint(const KbPtr& kb) const = 0;
  virtual std::string render_kb(const KbPtr& kb) const = 0;
  virtual void collect_constants(const KbPtr& kb,
                                 std::set<Symbol>& out) const = 0;
  virtual void collect_predicates(const KbPtr& kb,
                                  std::set<Symbol>& out) const = 0;
  // Internal predicate dependencies of the kb's rule component.
  virtual void collect_dependencies(const KbPtr& kb, int ctx_index,
                                    std::vector<DepEdge>& out) const = 0;
  // Canonical operation name for accepted alias spellings.
  virtual Symbol resolve_op(Symbol op) const = 0;
  // Whether the resolved operation is plain fact insertion; such heads
  // are the only monotone ones for stratification purposes, and they are
  // implicitly available to bridge rules in every context.
  virtual bool op_is_plain_add(Symbol op) const = 0;
  // Checks that the argument fits the operation; returns a description of
  // the problem or nullopt. bridge_head selects the laxer shape rules of
  // bridge-rule heads (plain add may also insert equalities).
  virtual std::optional<std::string> validate_op(Symbol resolved_op,
                                                 const OpArg& arg,
                                                 bool bridge_head) const = 0;
};

// Context-qualified body literal of a bridge rule or AIC.
struct QueryLiteral {
  int ctx = 0;  // 0-based context index
  LiteralCore core;

  QueryLiteral() = default;
  QueryLiteral(int c, LiteralCore l) : ctx(c), core(std::move(l)) {}

  bool operator==(const QueryLiteral& o) const {
    return ctx == o.ctx && core == o.core;
  }
  bool operator<(const QueryLiteral& o) const {
    if (ctx != o.ctx) return ctx < o.ctx;
    return core < o.core;
  }
};

// Bridge rule: head applies an operation in one context, body queries
// belief sets across contexts. A head without an explicit operation is
// the built-in insertion `add`, which every logic accepts in equilibrium
// computation even when the context exposes no update operations.
struct BridgeRule {
  int head_ctx = 0;
  Symbol op;  // "add" for the built-in insertion
  OpArg arg;
  std::vector<QueryLiteral> body;

  bool ground() const;
  std::string render(const class Mcs& m) const;
};

struct ManagedContext {
  std::string name;
  std::shared_ptr<const Logic> logic;
  KbPtr kb;
  // Operation names available to update actions (OP_i). Bridge-rule heads
  // may additionally use the built-in `add`.
  std::set<Symbol> op_names;
  // Import domain; nullopt = unrestricted (all constants of the system).
  std::optional<std::set<Symbol>> import_domain;
};

class Mcs {
 public:
  std::vector<ManagedContext> contexts;
  std::vector<BridgeRule> bridges;
  EvalLimits limits;

  int context_index(std::string_view name) const;  // -1 when absent
  const ManagedContext& ctx(int i) const { return contexts.at(i); }
  size_t size() const { return contexts.size(); }

  // Union of import domains, constants in kbs, and constants in bridge
  // rule bodies/heads.
  std::set<Symbol> active_domain() const;

  // Validates bridge-rule well-formedness (safety, context ranges, head
  // operations) and stratification of bridge rules plus context rules.
  // Throws StratificationError / std::invalid_argument.
  void validate() const;

  bool structurally_equal(const Mcs& o) const;
};

// Derives the default iteration bound from the size of the active domain.
EvalLimits default_limits_for(const Mcs& m);

// ACC of a single context.
std::optional<BeliefSet> accept(const ManagedContext& ctx,
                                const EvalLimits& limits);

// All ground instances of bridge rules applicable in s: positive literals
// hold, negated literals do not, variables instantiated from the head
// context's import domain.
std::vector<BridgeRule> ground_bridge_instances(const Mcs& m,
                                                const BeliefState& s);

// Satisfaction of a single ground body literal in a belief state.
bool literal_holds(const QueryLiteral& lit, const BeliefState& s);

std::optional<BeliefState> compute_equilibrium(const Mcs& m);
// Like compute_equilibrium but records every intermediate belief state.
std::optional<BeliefState> compute_equilibrium_trace(
    const Mcs& m, std::vector<BeliefState>* trace);
// Fast path for callers that already ran validate() on a structurally
// identical system (update-set variants share rules and bridge rules).
std::optional<BeliefState> compute_equilibrium_prevalidated(const Mcs& m);

bool is_logically_consistent(const Mcs& m);

// Definitional equilibrium check: S_i = ACC_i(mng_i(applicable heads, kb_i)).
bool is_equilibrium(const Mcs& m, const BeliefState& s);

}  // namespace mcsr

#endif
