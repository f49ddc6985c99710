#ifndef MCSR_DEDUCTIVE_HPP
#define MCSR_DEDUCTIVE_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mcsr/kernel.hpp"

namespace mcsr {

// A safe Horn rule with stratified negation and builtins (equality tests,
// at-most counting) in the body.
struct HornRule {
  Atom head;
  std::vector<LiteralCore> body;

  std::string render() const;
  bool operator==(const HornRule& o) const {
    return head == o.head && body == o.body;
  }
};

// An immutable rule set with its stratification precomputed. Shared by
// every kb derived from the same context.
class RuleProgram {
 public:
  // Throws StratificationError when negation is not stratified and
  // std::invalid_argument for unsafe rules.
  explicit RuleProgram(std::vector<HornRule> rules);

  const std::vector<HornRule>& rules() const { return rules_; }
  // Rule indices grouped by stratum, innermost first.
  const std::vector<std::vector<size_t>>& strata() const { return strata_; }
  void collect_dependencies(int ctx_index, std::vector<DepEdge>& out) const;

  static std::shared_ptr<const RuleProgram> empty();

 private:
  std::vector<HornRule> rules_;
  std::vector<std::vector<size_t>> strata_;
};

// Knowledge base of the deductive logic: ground facts, Horn rules,
// equalities over individuals and explicit inequality guards. A kb whose
// construction or update ran into a contradiction is marked failed; its
// accept() has no accepted belief set.
struct DeductiveKb : KbValue {
  std::set<Atom> facts;  // canonical w.r.t. eq
  std::shared_ptr<const RuleProgram> program = RuleProgram::empty();
  UnionFind eq;
  std::set<std::pair<Symbol, Symbol>> distinct;  // canonical, name-sorted
  bool failed = false;
  std::string fail_reason;

  bool has_fact(const Atom& a) const { return facts.count(a.canonical(eq)); }
  bool equal_ok() const;  // no distinct pair collapsed by eq

  bool operator==(const DeductiveKb& o) const;
  size_t fingerprint() const;
  std::string render() const;  // canonical single-line form
};

using DeductiveKbPtr = std::shared_ptr<const DeductiveKb>;

// Builds a kb, merging the given equalities and re-canonicalizing. Throws
// std::invalid_argument on non-ground facts or a distinct/equality clash.
DeductiveKbPtr make_kb(std::set<Atom> facts,
                       std::shared_ptr<const RuleProgram> program,
                       const std::vector<std::pair<Symbol, Symbol>>& equal = {},
                       const std::vector<std::pair<Symbol, Symbol>>& distinct =
                           {});

// The unique stratified least model, atoms canonicalized through the
// union-find; nullopt when the iteration bound is exhausted or the kb is
// failed.
std::optional<BeliefSet> least_model(const DeductiveKb& kb,
                                     const EvalLimits& limits);

// True iff at most k distinct equality classes y satisfy role(subject, y)
// in the model.
bool eval_count_at_most(const BeliefSet& model, int k, Symbol role,
                        Symbol subject);

// Built-in operation library.
namespace ops {
Symbol add();
Symbol del();
Symbol assert_equal();  // accepted spellings: assertEqual, assert
Symbol web_enroll();
Symbol unregister();
Symbol redistribute();

// All operation names selectable by a context declaration.
const std::set<Symbol>& library();
bool is_compound(Symbol op);
// Expected argument shape; nullopt when op is unknown.
std::optional<OpArg::Kind> arg_shape(Symbol op);
// Resolves accepted aliases (assert -> assertEqual); returns the input
// when it is not an alias.
Symbol resolve_alias(Symbol op);
}  // namespace ops

// Applies one operation. Semantic contradictions (assertEqual on a
// distinct pair, redistribute without a target class) yield a failed kb;
// malformed requests (unknown op, non-ground or ill-shaped argument)
// throw std::invalid_argument.
DeductiveKb apply_op(const DeductiveKb& kb, const GroundOp& op);

// One-shot application of a set of operations: each operation's effects
// are computed against the kb as left by the previous one, in the
// canonical (sorted) order of the set.
DeductiveKb apply_ops(const DeductiveKb& kb, std::span<const GroundOp> ops);

// Spec-level convenience: applies one operation and throws OperationError
// when the result is a failed kb.
DeductiveKbPtr apply_operation(const DeductiveKbPtr& kb, Symbol op,
                               const OpArg& arg);

class DeductiveLogic : public Logic {
 public:
  static std::shared_ptr<const DeductiveLogic> instance();

  std::optional<BeliefSet> accept(const KbPtr& kb,
                                  const EvalLimits& limits) const override;
  KbPtr apply(const KbPtr& kb, std::span<const GroundOp> ops) const override;
  bool kb_equal(const KbPtr& a, const KbPtr& b) const override;
  size_t kb_fingerprint(const KbPtr& kb) const override;
  std::string render_kb(const KbPtr& kb) const override;
  void collect_constants(const KbPtr& kb,
                         std::set<Symbol>& out) const override;
  void collect_predicates(const KbPtr& kb,
                          std::set<Symbol>& out) const override;
  void collect_dependencies(const KbPtr& kb, int ctx_index,
                            std::vector<DepEdge>& out) const override;
  Symbol resolve_op(Symbol op) const override;
  bool op_is_plain_add(Symbol op) const override;
  std::optional<std::string> validate_op(Symbol resolved_op, const OpArg& arg,
                                         bool bridge_head) const override;

  static const DeductiveKb& kb_of(const KbPtr& kb);
};

// Validates rule safety (head and negated/builtin variables bound by
// positive body atoms); returns an error description or nullopt.
std::optional<std::string> check_rule_safety(const HornRule& rule);

}  // namespace mcsr

#endif
