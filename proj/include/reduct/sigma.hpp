#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reduct/strings.hpp"

// Two-sorted bounded formulas: number terms built from 0, 1, +, *, and
// string lengths; formulas with =, <=, string-bit membership, the boolean
// connectives, and bounded number quantifiers (inclusive upper bound).
// String variables can only appear free; there is no string quantifier.
namespace reduct::sigma {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Zero, One, Var, Add, Mul, Len };
  Kind kind;
  std::string name;  // Var: number variable, Len: string variable
  TermPtr a, b;
};

TermPtr t_zero();
TermPtr t_one();
TermPtr t_var(std::string name);
TermPtr t_add(TermPtr l, TermPtr r);
TermPtr t_mul(TermPtr l, TermPtr r);
TermPtr t_len(std::string strvar);
// Builds the numeral n as a balanced binary combination of 0, 1, + and *.
TermPtr t_num(uint64_t n);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Eq, Leq, In, Not, And, Or, Imp, All, Ex };
  Kind kind;
  TermPtr t, u;      // Eq/Leq: both; In: t is the index term; All/Ex: t is the bound
  std::string var;   // In: string variable; All/Ex: bound number variable
  FormulaPtr f, g;   // Not: f; And/Or/Imp: f,g; All/Ex: f is the body
};

FormulaPtr f_eq(TermPtr t, TermPtr u);
FormulaPtr f_leq(TermPtr t, TermPtr u);
FormulaPtr f_in(std::string strvar, TermPtr t);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr f, FormulaPtr g);
FormulaPtr f_or(FormulaPtr f, FormulaPtr g);
FormulaPtr f_imp(FormulaPtr f, FormulaPtr g);
// Throws StructureError if the bound term mentions the quantified variable.
FormulaPtr f_all(std::string var, TermPtr bound, FormulaPtr body);
FormulaPtr f_ex(std::string var, TermPtr bound, FormulaPtr body);
// Conjunction/disjunction of a list, combined as a balanced tree. An empty
// list is not representable and throws StructureError.
FormulaPtr f_and_all(std::vector<FormulaPtr> fs);
FormulaPtr f_or_all(std::vector<FormulaPtr> fs);
// (f -> g) /\ (g -> f)
FormulaPtr f_iff(FormulaPtr f, FormulaPtr g);

struct Environment {
  std::map<std::string, uint64_t> numvals;
  std::map<std::string, StringValue> strvals;
};

// Overflow past 64 bits raises EvalError; unbound variables raise EvalError.
uint64_t eval_term(const TermPtr& t, const Environment& env);
bool eval_formula(const FormulaPtr& f, const Environment& env);

struct FreeVars {
  std::set<std::string> nums;
  std::set<std::string> strs;
};
FreeVars free_variables(const FormulaPtr& f);

// S-expression grammar:
//   term    := 0 | 1 | numvar | (+ t t) | (* t t) | (len STRVAR)
//   formula := (= t t) | (<= t t) | (in STRVAR t) | (not f) | (and f f)
//            | (or f f) | (imp f f) | (all numvar t f) | (ex numvar t f)
// Number variables start with a lowercase letter, string variables with an
// uppercase letter. Attempting to quantify a string variable is an error.
TermPtr parse_term(std::string_view text);
FormulaPtr parse_formula(std::string_view text);

std::string render(const TermPtr& t);
std::string render(const FormulaPtr& f);
// Infix pretty form for human consumption; not accepted by the parser.
std::string render_infix(const FormulaPtr& f);

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

}  // namespace reduct::sigma
