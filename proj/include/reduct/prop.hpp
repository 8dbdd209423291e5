#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Propositional formulas over {T, F, atoms, ~, &, |, >} stored as a
// globally interned DAG: structurally equal formulas share one node, so
// handle equality is pointer equality. Nodes are immortal.
namespace reduct::prop {

struct Atom {
  enum class Kind : uint8_t { StringBit, Named };
  Kind kind = Kind::Named;
  std::string name;    // StringBit: the string variable; Named: the label
  uint32_t index = 0;  // StringBit only

  static Atom string_bit(std::string var, uint32_t index);
  static Atom named(std::string label);
  static Atom named(uint64_t number);

  // StringBit -> "pVAR.index", Named -> "q" + label.
  std::string text() const;

  bool operator==(const Atom& o) const;
  bool operator!=(const Atom& o) const { return !(*this == o); }
  // StringBit atoms sort before Named ones; StringBit by (var, index),
  // Named numerically when both labels are numeric.
  bool operator<(const Atom& o) const;
};

enum class Op : uint8_t { False, True, Atom, Not, And, Or, Imp };

struct Node {
  Op op;
  const Node* a;  // Not/And/Or/Imp
  const Node* b;  // And/Or/Imp
  Atom atom;      // Op::Atom only
  // Symbol count of the fully expanded tree (saturating); for the DAG node
  // count use node_count() below.
  uint64_t symbol_size;
};

class Formula {
 public:
  Formula() = default;
  explicit Formula(const Node* n) : n_(n) {}

  Op op() const { return n_->op; }
  Formula left() const { return Formula(n_->a); }
  Formula right() const { return Formula(n_->b); }
  const Atom& atom() const { return n_->atom; }
  uint64_t symbol_size() const { return n_->symbol_size; }
  const Node* node() const { return n_; }

  explicit operator bool() const { return n_ != nullptr; }
  bool operator==(const Formula& o) const { return n_ == o.n_; }
  bool operator!=(const Formula& o) const { return n_ != o.n_; }

 private:
  const Node* n_ = nullptr;
};

struct FormulaHash {
  size_t operator()(const Formula& f) const {
    return std::hash<const void*>()(f.node());
  }
};

struct AtomHash {
  size_t operator()(const Atom& a) const {
    size_t h = std::hash<std::string>()(a.name);
    h = h * 1000003u ^ static_cast<size_t>(a.kind);
    return h * 1000003u ^ a.index;
  }
};

Formula f_false();
Formula f_true();
Formula f_atom(Atom a);
Formula f_not(Formula f);
Formula f_and(Formula a, Formula b);
Formula f_or(Formula a, Formula b);
Formula f_imp(Formula a, Formula b);
Formula f_const(bool v);
// Balanced combination; empty list gives the neutral constant (T for and,
// F for or).
Formula f_and_all(const std::vector<Formula>& fs);
Formula f_or_all(const std::vector<Formula>& fs);

// T/F if the formula is that constant.
std::optional<bool> const_value(Formula f);

// Distinct atoms, sorted.
std::vector<Atom> atoms(Formula f);
size_t node_count(Formula f);

using Assignment = std::map<Atom, bool>;

// Unbound atom raises EvalError.
bool eval_prop(Formula f, const Assignment& a);

// Simultaneous substitution; atoms absent from the map stay themselves.
// Identity substitutions return the identical nodes.
Formula substitute(Formula f, const std::map<Atom, Formula>& sigma);

// Root first, then children left to right depth-first, duplicates removed.
std::vector<Formula> subformulas(Formula f);

// One top-level rewrite given already-folded children: constants absorb
// through connectives (~T -> F, T&b -> b, a>F -> ~a, and so on). Returns
// the plain combination when no rule applies.
Formula fold_step(Op op, Formula a, Formula b);
// Bottom-up constant folding; the result contains no constant under a
// connective (a constant can only be the root).
Formula fold_constants(Formula f);

// Text format: `T`, `F`, `qNAME`, `pX.i`, `(~ f)`, `(& f f)`, `(| f f)`,
// `(> f f)`.
Formula parse_formula(std::string_view text);
// Parses one formula from the front of `text`; stores how many characters
// it consumed (trailing input stays unread).
Formula parse_formula_prefix(std::string_view text, size_t* consumed);
Atom parse_atom(std::string_view text);
std::string render(Formula f);

}  // namespace reduct::prop
