#include "mcsr/symbols.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mcsr {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_map<std::string, uint32_t> ids;
  // deque: element addresses stay valid as the table grows
  std::deque<std::string> names;

  SymbolTable() {
    names.emplace_back("");  // id 0 = empty symbol
    ids.emplace("", 0);
  }

  static SymbolTable& instance() {
    static SymbolTable t;
    return t;
  }
};

}  // namespace

Symbol Symbol::intern(std::string_view name) {
  SymbolTable& t = SymbolTable::instance();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return Symbol(it->second);
  uint32_t id = static_cast<uint32_t>(t.names.size());
  t.names.emplace_back(name);
  t.ids.emplace(std::string(name), id);
  return Symbol(id);
}

std::string_view Symbol::str() const {
  SymbolTable& t = SymbolTable::instance();
  std::lock_guard<std::mutex> lock(t.mu);
  assert(id_ < t.names.size());
  return t.names[id_];
}

bool Term::is_variable_name(std::string_view name) {
  if (name.empty()) return false;
  char c = name.front();
  return (c >= 'A' && c <= 'Z') || c == '_';
}

Term Term::from_name(std::string_view name) {
  Symbol s = Symbol::intern(name);
  return is_variable_name(name) ? variable(s) : constant(s);
}

bool Atom::ground() const {
  for (const Term& t : args_)
    if (t.is_variable()) return false;
  return true;
}

Atom Atom::canonical(const UnionFind& eq) const {
  std::vector<Term> args = args_;
  for (Term& t : args)
    if (t.is_constant()) t = Term::constant(eq.find(t.sym()));
  return Atom(pred_, std::move(args));
}

void Atom::collect_vars(std::vector<Symbol>& out) const {
  for (const Term& t : args_)
    if (t.is_variable()) out.push_back(t.sym());
}

void Atom::collect_consts(std::vector<Symbol>& out) const {
  for (const Term& t : args_)
    if (t.is_constant()) out.push_back(t.sym());
}

std::string Atom::render() const {
  std::ostringstream os;
  os << pred_.str();
  os << '(';
  for (size_t i = 0; i < args_.size(); ++i) {
    if (i) os << ", ";
    os << args_[i].str();
  }
  os << ')';
  return os.str();
}

bool AtomNameLess::operator()(const Atom& a, const Atom& b) const {
  if (a.pred() != b.pred()) {
    auto an = a.pred().str(), bn = b.pred().str();
    if (an != bn) return an < bn;
  }
  size_t n = std::min(a.args().size(), b.args().size());
  for (size_t i = 0; i < n; ++i) {
    const Term &x = a.args()[i], &y = b.args()[i];
    if (x.is_variable() != y.is_variable()) return y.is_variable();
    auto xs = x.str(), ys = y.str();
    if (xs != ys) return xs < ys;
  }
  return a.args().size() < b.args().size();
}

Symbol UnionFind::parent_of(Symbol s) const {
  for (const auto& [c, p] : parent_)
    if (c == s) return p;
  return s;
}

void UnionFind::set_parent(Symbol child, Symbol root) {
  for (auto& [c, p] : parent_) {
    if (c == child) {
      p = root;
      return;
    }
  }
  parent_.emplace_back(child, root);
}

Symbol UnionFind::find(Symbol s) const {
  Symbol cur = s;
  for (;;) {
    Symbol p = parent_of(cur);
    if (p == cur) return cur;
    cur = p;
  }
}

bool UnionFind::merge(Symbol a, Symbol b) {
  Symbol ra = find(a), rb = find(b);
  if (ra == rb) return false;
  // representative = lexicographically least name
  if (SymbolNameLess{}(rb, ra)) std::swap(ra, rb);
  set_parent(rb, ra);
  return true;
}

std::vector<std::pair<Symbol, Symbol>> UnionFind::normalized() const {
  std::map<std::string_view, std::pair<Symbol, Symbol>> sorted;
  for (const auto& [child, p] : parent_) {
    (void)p;
    Symbol root = find(child);
    if (root != child) sorted.emplace(child.str(), std::make_pair(child, root));
  }
  std::vector<std::pair<Symbol, Symbol>> out;
  out.reserve(sorted.size());
  for (auto& [k, v] : sorted) {
    (void)k;
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<Symbol>> UnionFind::nontrivial_classes() const {
  std::map<std::string_view, std::vector<Symbol>> by_root;
  for (const auto& [child, p] : parent_) {
    (void)p;
    Symbol root = find(child);
    auto& cls = by_root[root.str()];
    if (cls.empty()) cls.push_back(root);
    if (child != root) cls.push_back(child);
  }
  std::vector<std::vector<Symbol>> out;
  for (auto& [k, v] : by_root) {
    (void)k;
    if (v.size() < 2) continue;
    std::sort(v.begin(), v.end(), SymbolNameLess{});
    out.push_back(std::move(v));
  }
  return out;
}

uint64_t fnv1a(std::string_view data, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mcsr
