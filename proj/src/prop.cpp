#include "reduct/prop.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "reduct/errors.hpp"

namespace reduct::prop {

namespace {

uint64_t sat_add(uint64_t a, uint64_t b) {
  uint64_t s;
  if (__builtin_add_overflow(a, b, &s)) return UINT64_MAX;
  return s;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

struct NodeKey {
  Op op;
  const Node* a;
  const Node* b;
  Atom atom;
  bool operator==(const NodeKey& o) const {
    return op == o.op && a == o.a && b == o.b && atom == o.atom;
  }
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    size_t h = static_cast<size_t>(k.op);
    auto mix = [&h](size_t v) { h = h * 1000003u ^ v; };
    mix(std::hash<const void*>()(k.a));
    mix(std::hash<const void*>()(k.b));
    mix(static_cast<size_t>(k.atom.kind));
    mix(std::hash<std::string>()(k.atom.name));
    mix(k.atom.index);
    return h;
  }
};

// Global intern table. Nodes are immortal; concurrent construction is
// serialized here, everything downstream is read-only.
struct Interner {
  std::mutex mu;
  std::unordered_map<NodeKey, std::unique_ptr<Node>, NodeKeyHash> table;

  const Node* get(Op op, const Node* a, const Node* b, Atom atom) {
    uint64_t size = 1;
    if (a) size = sat_add(size, a->symbol_size);
    if (b) size = sat_add(size, b->symbol_size);
    NodeKey key{op, a, b, atom};
    std::lock_guard<std::mutex> lock(mu);
    auto it = table.find(key);
    if (it != table.end()) return it->second.get();
    auto node = std::make_unique<Node>(Node{op, a, b, std::move(key.atom), size});
    const Node* raw = node.get();
    table.emplace(NodeKey{op, a, b, raw->atom}, std::move(node));
    return raw;
  }
};

Interner& interner() {
  static Interner i;
  return i;
}

}  // namespace

Atom Atom::string_bit(std::string var, uint32_t index) {
  Atom a;
  a.kind = Kind::StringBit;
  a.name = std::move(var);
  a.index = index;
  return a;
}

Atom Atom::named(std::string label) {
  Atom a;
  a.kind = Kind::Named;
  a.name = std::move(label);
  return a;
}

Atom Atom::named(uint64_t number) { return named(std::to_string(number)); }

std::string Atom::text() const {
  if (kind == Kind::StringBit) return "p" + name + "." + std::to_string(index);
  return "q" + name;
}

bool Atom::operator==(const Atom& o) const {
  return kind == o.kind && name == o.name && index == o.index;
}

bool Atom::operator<(const Atom& o) const {
  if (kind != o.kind) return kind == Kind::StringBit;
  if (kind == Kind::StringBit) {
    if (name != o.name) return name < o.name;
    return index < o.index;
  }
  bool an = all_digits(name), bn = all_digits(o.name);
  if (an != bn) return an;  // numeric labels first
  if (an && name.size() != o.name.size()) return name.size() < o.name.size();
  return name < o.name;
}

Formula f_false() {
  static Formula f(interner().get(Op::False, nullptr, nullptr, Atom{}));
  return f;
}

Formula f_true() {
  static Formula f(interner().get(Op::True, nullptr, nullptr, Atom{}));
  return f;
}

Formula f_const(bool v) { return v ? f_true() : f_false(); }

Formula f_atom(Atom a) {
  return Formula(interner().get(Op::Atom, nullptr, nullptr, std::move(a)));
}

Formula f_not(Formula f) {
  return Formula(interner().get(Op::Not, f.node(), nullptr, Atom{}));
}

Formula f_and(Formula a, Formula b) {
  return Formula(interner().get(Op::And, a.node(), b.node(), Atom{}));
}

Formula f_or(Formula a, Formula b) {
  return Formula(interner().get(Op::Or, a.node(), b.node(), Atom{}));
}

Formula f_imp(Formula a, Formula b) {
  return Formula(interner().get(Op::Imp, a.node(), b.node(), Atom{}));
}

namespace {
Formula balanced(const std::vector<Formula>& fs, size_t lo, size_t hi,
                 Formula (*join)(Formula, Formula)) {
  if (hi - lo == 1) return fs[lo];
  size_t mid = lo + (hi - lo) / 2;
  return join(balanced(fs, lo, mid, join), balanced(fs, mid, hi, join));
}
}  // namespace

Formula f_and_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return f_true();
  return balanced(fs, 0, fs.size(), f_and);
}

Formula f_or_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return f_false();
  return balanced(fs, 0, fs.size(), f_or);
}

std::optional<bool> const_value(Formula f) {
  if (f.op() == Op::True) return true;
  if (f.op() == Op::False) return false;
  return std::nullopt;
}

namespace {
void collect_nodes(const Node* n, std::unordered_map<const Node*, char>& seen,
                   std::vector<Formula>* order) {
  if (!seen.emplace(n, 0).second) return;
  if (order) order->push_back(Formula(n));
  if (n->a) collect_nodes(n->a, seen, order);
  if (n->b) collect_nodes(n->b, seen, order);
}
}  // namespace

std::vector<Atom> atoms(Formula f) {
  std::unordered_map<const Node*, char> seen;
  std::vector<Formula> order;
  collect_nodes(f.node(), seen, &order);
  std::vector<Atom> out;
  for (const Formula& g : order)
    if (g.op() == Op::Atom) out.push_back(g.atom());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

size_t node_count(Formula f) {
  std::unordered_map<const Node*, char> seen;
  collect_nodes(f.node(), seen, nullptr);
  return seen.size();
}

std::vector<Formula> subformulas(Formula f) {
  std::unordered_map<const Node*, char> seen;
  std::vector<Formula> order;
  collect_nodes(f.node(), seen, &order);
  return order;
}

namespace {
bool eval_node(const Node* n, const Assignment& a,
               std::unordered_map<const Node*, bool>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  bool v;
  switch (n->op) {
    case Op::False:
      v = false;
      break;
    case Op::True:
      v = true;
      break;
    case Op::Atom: {
      auto at = a.find(n->atom);
      if (at == a.end()) throw EvalError("unassigned atom " + n->atom.text());
      v = at->second;
      break;
    }
    case Op::Not:
      v = !eval_node(n->a, a, memo);
      break;
    case Op::And:
      v = eval_node(n->a, a, memo) && eval_node(n->b, a, memo);
      break;
    case Op::Or:
      v = eval_node(n->a, a, memo) || eval_node(n->b, a, memo);
      break;
    case Op::Imp:
      v = !eval_node(n->a, a, memo) || eval_node(n->b, a, memo);
      break;
  }
  memo.emplace(n, v);
  return v;
}
}  // namespace

bool eval_prop(Formula f, const Assignment& a) {
  std::unordered_map<const Node*, bool> memo;
  return eval_node(f.node(), a, memo);
}

namespace {
const Node* subst_node(const Node* n, const std::map<Atom, Formula>& sigma,
                       std::unordered_map<const Node*, const Node*>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  const Node* out;
  switch (n->op) {
    case Op::False:
    case Op::True:
      out = n;
      break;
    case Op::Atom: {
      auto at = sigma.find(n->atom);
      out = at == sigma.end() ? n : at->second.node();
      break;
    }
    case Op::Not: {
      const Node* a = subst_node(n->a, sigma, memo);
      out = a == n->a ? n : f_not(Formula(a)).node();
      break;
    }
    default: {
      const Node* a = subst_node(n->a, sigma, memo);
      const Node* b = subst_node(n->b, sigma, memo);
      out = (a == n->a && b == n->b)
                ? n
                : interner().get(n->op, a, b, Atom{});
      break;
    }
  }
  memo.emplace(n, out);
  return out;
}
}  // namespace

Formula substitute(Formula f, const std::map<Atom, Formula>& sigma) {
  if (sigma.empty()) return f;
  std::unordered_map<const Node*, const Node*> memo;
  return Formula(subst_node(f.node(), sigma, memo));
}

Formula fold_step(Op op, Formula a, Formula b) {
  switch (op) {
    case Op::Not:
      if (a == f_true()) return f_false();
      if (a == f_false()) return f_true();
      return f_not(a);
    case Op::And:
      if (a == f_true()) return b;
      if (b == f_true()) return a;
      if (a == f_false() || b == f_false()) return f_false();
      return f_and(a, b);
    case Op::Or:
      if (a == f_true() || b == f_true()) return f_true();
      if (a == f_false()) return b;
      if (b == f_false()) return a;
      return f_or(a, b);
    case Op::Imp:
      if (a == f_false() || b == f_true()) return f_true();
      if (a == f_true()) return b;
      if (b == f_false()) return f_not(a);
      return f_imp(a, b);
    default:
      throw StructureError("fold_step needs a connective");
  }
}

namespace {
const Node* fold_node(const Node* n, std::unordered_map<const Node*, const Node*>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  const Node* out;
  switch (n->op) {
    case Op::False:
    case Op::True:
    case Op::Atom:
      out = n;
      break;
    case Op::Not:
      out = fold_step(Op::Not, Formula(fold_node(n->a, memo)), Formula()).node();
      break;
    default:
      out = fold_step(n->op, Formula(fold_node(n->a, memo)),
                      Formula(fold_node(n->b, memo)))
                .node();
      break;
  }
  memo.emplace(n, out);
  return out;
}
}  // namespace

Formula fold_constants(Formula f) {
  std::unordered_map<const Node*, const Node*> memo;
  return Formula(fold_node(f.node(), memo));
}

// --- text format -------------------------------------------------------

namespace {

struct PropParser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }

  std::string token() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos;
    }
    if (pos == start) fail("expected a token");
    return std::string(text.substr(start, pos - start));
  }

  static bool label_chars(std::string_view s) {
    for (char c : s) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return !s.empty();
  }

  Atom atom_from(const std::string& tok, size_t at) {
    if (tok.size() >= 2 && tok[0] == 'p' &&
        std::isupper(static_cast<unsigned char>(tok[1]))) {
      size_t dot = tok.find('.');
      if (dot == std::string::npos || dot + 1 >= tok.size())
        throw ParseError("string-bit atom needs '.index': " + tok, at);
      std::string var = tok.substr(1, dot - 1);
      std::string idx = tok.substr(dot + 1);
      if (!label_chars(var)) throw ParseError("bad variable in " + tok, at);
      if (!all_digits(idx) || idx.size() > 9)
        throw ParseError("bad bit index in " + tok, at);
      unsigned long v = std::stoul(idx);
      return Atom::string_bit(std::move(var), static_cast<uint32_t>(v));
    }
    if (tok.size() >= 2 && tok[0] == 'q' && label_chars(tok.substr(1)))
      return Atom::named(tok.substr(1));
    throw ParseError("unknown atom '" + tok + "'", at);
  }

  Formula formula() {
    char c = peek();
    if (c == '(') {
      ++pos;
      size_t at = pos;
      std::string op = token();
      Formula result;
      if (op == "~") {
        result = f_not(formula());
      } else if (op == "&" || op == "|" || op == ">") {
        Formula l = formula();
        Formula r = formula();
        result = op == "&" ? f_and(l, r) : op == "|" ? f_or(l, r) : f_imp(l, r);
      } else {
        throw ParseError("unknown connective '" + op + "'", at);
      }
      expect(')');
      return result;
    }
    size_t at = pos;
    std::string tok = token();
    if (tok == "T") return f_true();
    if (tok == "F") return f_false();
    return f_atom(atom_from(tok, at));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  void eof() {
    skip_ws();
    if (pos < text.size()) fail("trailing input");
  }
};

void render_node(const Node* n, std::string& out) {
  switch (n->op) {
    case Op::False:
      out += 'F';
      return;
    case Op::True:
      out += 'T';
      return;
    case Op::Atom:
      out += n->atom.text();
      return;
    case Op::Not:
      out += "(~ ";
      render_node(n->a, out);
      out += ')';
      return;
    case Op::And:
    case Op::Or:
    case Op::Imp:
      out += n->op == Op::And ? "(& " : n->op == Op::Or ? "(| " : "(> ";
      render_node(n->a, out);
      out += ' ';
      render_node(n->b, out);
      out += ')';
      return;
  }
}

}  // namespace

Formula parse_formula(std::string_view text) {
  PropParser p{text};
  Formula f = p.formula();
  p.eof();
  return f;
}

Formula parse_formula_prefix(std::string_view text, size_t* consumed) {
  PropParser p{text};
  Formula f = p.formula();
  if (consumed != nullptr) *consumed = p.pos;
  return f;
}

Atom parse_atom(std::string_view text) {
  PropParser p{text};
  p.skip_ws();
  size_t at = p.pos;
  std::string tok = p.token();
  Atom a = p.atom_from(tok, at);
  p.eof();
  return a;
}

std::string render(Formula f) {
  std::string out;
  render_node(f.node(), out);
  return out;
}

}  // namespace reduct::prop
