#ifndef MCSR_SYMBOLS_HPP
#define MCSR_SYMBOLS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcsr {

// Interned identifier. Equality is id equality; operator< orders by id
// (stable within a run). Use name_less for lexicographic order on names,
// which is the tie-breaking order used everywhere in output.
class Symbol {
 public:
  Symbol() : id_(0) {}
  static Symbol intern(std::string_view name);

  std::string_view str() const;
  uint32_t id() const { return id_; }

  bool operator==(const Symbol& o) const { return id_ == o.id_; }
  bool operator!=(const Symbol& o) const { return id_ != o.id_; }
  bool operator<(const Symbol& o) const { return id_ < o.id_; }

 private:
  explicit Symbol(uint32_t id) : id_(id) {}
  uint32_t id_;
};

struct SymbolNameLess {
  bool operator()(Symbol a, Symbol b) const { return a.str() < b.str(); }
};

// A term is a constant or a variable. Variables are recognized
// syntactically: leading uppercase letter or underscore.
class Term {
 public:
  Term() : var_(false) {}
  static Term constant(Symbol s) { return Term(s, false); }
  static Term variable(Symbol s) { return Term(s, true); }
  // Classifies by spelling.
  static Term from_name(std::string_view name);
  static bool is_variable_name(std::string_view name);

  Symbol sym() const { return sym_; }
  bool is_variable() const { return var_; }
  bool is_constant() const { return !var_; }
  std::string_view str() const { return sym_.str(); }

  bool operator==(const Term& o) const {
    return var_ == o.var_ && sym_ == o.sym_;
  }
  bool operator!=(const Term& o) const { return !(*this == o); }
  bool operator<(const Term& o) const {
    if (var_ != o.var_) return var_ < o.var_;
    return sym_ < o.sym_;
  }

 private:
  Term(Symbol s, bool v) : sym_(s), var_(v) {}
  Symbol sym_;
  bool var_;
};

class UnionFind;

class Atom {
 public:
  Atom() = default;
  Atom(Symbol pred, std::vector<Term> args)
      : pred_(pred), args_(std::move(args)) {}

  Symbol pred() const { return pred_; }
  const std::vector<Term>& args() const { return args_; }
  size_t arity() const { return args_.size(); }

  bool ground() const;
  // Replaces every constant by its equality-class representative.
  Atom canonical(const UnionFind& eq) const;
  void collect_vars(std::vector<Symbol>& out) const;
  void collect_consts(std::vector<Symbol>& out) const;

  std::string render() const;

  bool operator==(const Atom& o) const {
    return pred_ == o.pred_ && args_ == o.args_;
  }
  bool operator!=(const Atom& o) const { return !(*this == o); }
  bool operator<(const Atom& o) const {
    if (pred_ != o.pred_) return pred_ < o.pred_;
    return args_ < o.args_;
  }

 private:
  Symbol pred_;
  std::vector<Term> args_;
};

// Lexicographic order on rendered text; used wherever output order or
// tie-breaking must not depend on interning order.
struct AtomNameLess {
  bool operator()(const Atom& a, const Atom& b) const;
};

// Equivalence relation over constant symbols. The representative of a
// class is its lexicographically least member.
class UnionFind {
 public:
  Symbol find(Symbol s) const;
  // Returns false if the two were already equal.
  bool merge(Symbol a, Symbol b);
  bool same(Symbol a, Symbol b) const { return find(a) == find(b); }
  bool trivial() const { return parent_.empty(); }

  // Normalized map constant -> representative, self-maps dropped.
  std::vector<std::pair<Symbol, Symbol>> normalized() const;
  // All classes with more than one member, each sorted by name.
  std::vector<std::vector<Symbol>> nontrivial_classes() const;

  bool operator==(const UnionFind& o) const {
    return normalized() == o.normalized();
  }

 private:
  // child -> parent; identity when absent
  std::vector<std::pair<Symbol, Symbol>> parent_;
  Symbol parent_of(Symbol s) const;
  void set_parent(Symbol child, Symbol root);
};

uint64_t fnv1a(std::string_view data, uint64_t seed = 1469598103934665603ull);

}  // namespace mcsr

#endif
