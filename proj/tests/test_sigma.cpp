#include "reduct/sigma.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "reduct/errors.hpp"
#include "reduct/strings.hpp"

namespace {

using namespace reduct;
using sigma::FormulaPtr;
using sigma::TermPtr;

// Second-opinion evaluator over a set-of-naturals string representation,
// structurally unrelated to the library's bit-vector one.  Used to
// cross-check eval_formula below.
struct RefEnv {
  std::map<std::string, uint64_t> nums;
  std::map<std::string, std::set<uint64_t>> strs;
};

uint64_t ref_len(const std::set<uint64_t>& s) {
  return s.empty() ? 0 : *s.rbegin() + 1;
}

uint64_t ref_term(const TermPtr& t, const RefEnv& env) {
  switch (t->kind) {
    case sigma::Term::Kind::Zero: return 0;
    case sigma::Term::Kind::One: return 1;
    case sigma::Term::Kind::Var: {
      auto it = env.nums.find(t->name);
      if (it == env.nums.end()) throw EvalError("unbound " + t->name);
      return it->second;
    }
    case sigma::Term::Kind::Add: {
      uint64_t a = ref_term(t->a, env), b = ref_term(t->b, env), s = a + b;
      if (s < a) throw EvalError("overflow");
      return s;
    }
    case sigma::Term::Kind::Mul: {
      uint64_t a = ref_term(t->a, env), b = ref_term(t->b, env);
      if (a != 0 && b > UINT64_MAX / a) throw EvalError("overflow");
      return a * b;
    }
    case sigma::Term::Kind::Len: {
      auto it = env.strs.find(t->name);
      if (it == env.strs.end()) throw EvalError("unbound " + t->name);
      return ref_len(it->second);
    }
  }
  throw EvalError("bad term");
}

bool ref_formula(const FormulaPtr& f, RefEnv& env) {
  switch (f->kind) {
    case sigma::Formula::Kind::Eq:
      return ref_term(f->t, env) == ref_term(f->u, env);
    case sigma::Formula::Kind::Leq:
      return ref_term(f->t, env) <= ref_term(f->u, env);
    case sigma::Formula::Kind::In: {
      auto it = env.strs.find(f->var);
      if (it == env.strs.end()) throw EvalError("unbound " + f->var);
      return it->second.count(ref_term(f->t, env)) != 0;
    }
    case sigma::Formula::Kind::Not: return !ref_formula(f->f, env);
    case sigma::Formula::Kind::And:
      return ref_formula(f->f, env) && ref_formula(f->g, env);
    case sigma::Formula::Kind::Or:
      return ref_formula(f->f, env) || ref_formula(f->g, env);
    case sigma::Formula::Kind::Imp:
      return !ref_formula(f->f, env) || ref_formula(f->g, env);
    case sigma::Formula::Kind::All:
    case sigma::Formula::Kind::Ex: {
      const bool all = f->kind == sigma::Formula::Kind::All;
      const uint64_t bound = ref_term(f->t, env);
      std::optional<uint64_t> saved;
      if (auto it = env.nums.find(f->var); it != env.nums.end())
        saved = it->second;
      bool out = all;
      for (uint64_t v = 0; v <= bound; ++v) {
        env.nums[f->var] = v;
        const bool b = ref_formula(f->f, env);
        if (all ? !b : b) {
          out = !all;
          break;
        }
      }
      if (saved)
        env.nums[f->var] = *saved;
      else
        env.nums.erase(f->var);
      return out;
    }
  }
  throw EvalError("bad formula");
}

sigma::Environment to_environment(const RefEnv& env) {
  sigma::Environment out;
  out.numvals = env.nums;
  for (const auto& [name, elems] : env.strs)
    out.strvals[name] = StringValue::from_elements(
        std::vector<uint64_t>(elems.begin(), elems.end()));
  return out;
}

std::vector<std::string> corpus_texts() {
  std::ifstream in(REDUCT_SOURCE_DIR "/tests/data/sigma_corpus.txt");
  REQUIRE(in.good());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const size_t sp = line.find(' ');
    REQUIRE(sp != std::string::npos);
    out.push_back(line.substr(sp + 1));
  }
  return out;
}

}  // namespace

TEST_CASE("string values behave as finite sets of naturals") {
  StringValue s = StringValue::from_elements({0, 2});
  CHECK(s.length() == 3);
  CHECK(s.bit(0));
  CHECK_FALSE(s.bit(1));
  CHECK(s.bit(2));
  CHECK_FALSE(s.bit(3));  // total beyond the length
  CHECK(s.to01() == "101");
  CHECK(StringValue::parse01("101") == s);
  CHECK(s.elements() == std::vector<uint64_t>{0, 2});

  SUBCASE("empty value") {
    StringValue e;
    CHECK(e.length() == 0);
    CHECK(e.empty());
    CHECK(e.to01().empty());
    CHECK(StringValue::from_elements({}) == e);
  }
  SUBCASE("trailing zeros trim away") {
    CHECK(StringValue::from_bits({true, false, false}).length() == 1);
    CHECK(StringValue::parse01("1000") == StringValue::parse01("1"));
  }
  SUBCASE("flip retrims when the top element goes") {
    StringValue t = StringValue::from_elements({0, 2});
    t.flip(2);
    CHECK(t.length() == 1);
    t.flip(5);
    CHECK(t.length() == 6);
    t.erase(5);
    CHECK(t.length() == 1);
    t.insert(3);
    CHECK(t == StringValue::from_elements({0, 3}));
  }
}

TEST_CASE("term and formula parsing round trips through render") {
  const std::vector<std::string> terms = {
      "0", "1", "x", "(+ x 1)", "(* (+ 1 1) (len X))", "(len Xlong)",
  };
  for (const std::string& text : terms) {
    const TermPtr t = sigma::parse_term(text);
    CHECK(sigma::render(t) == text);
    CHECK(sigma::equal(t, sigma::parse_term(sigma::render(t))));
  }
  for (const std::string& text : corpus_texts()) {
    const FormulaPtr f = sigma::parse_formula(text);
    CHECK(sigma::render(f) == text);
    CHECK(sigma::equal(f, sigma::parse_formula(sigma::render(f))));
    CHECK_FALSE(sigma::render_infix(f).empty());
  }
}

TEST_CASE("parse rejects malformed input with a position") {
  const std::vector<std::string> bad = {
      "", "(", "(= 0)", "(= 0 1", "(foo 0 1)", "(in x 0)", "(len X)",
      "(= 0 1) junk", "(all X 1 (in X 0))", "(all i i (= i i))",
  };
  for (const std::string& text : bad)
    CHECK_THROWS(sigma::parse_formula(text));
  try {
    sigma::parse_formula("(= 0 ?)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos == 6);
    CHECK(std::string(e.what()).find("offset 6") != std::string::npos);
  }
}

TEST_CASE("builders enforce variable sorts and bound hygiene") {
  CHECK_THROWS_AS(sigma::t_var("X"), StructureError);
  CHECK_THROWS_AS(sigma::t_len("x"), StructureError);
  CHECK_THROWS_AS(sigma::f_in("x", sigma::t_zero()), StructureError);
  // The bound of a quantifier may not mention its own variable.
  CHECK_THROWS_AS(
      sigma::f_all("i", sigma::t_var("i"), sigma::f_eq(sigma::t_zero(), sigma::t_zero())),
      StructureError);
  // An outer variable in an inner bound is fine.
  const FormulaPtr nested = sigma::parse_formula("(all i 1 (ex j (+ i 1) (<= j i)))");
  CHECK(sigma::render(nested) == "(all i 1 (ex j (+ i 1) (<= j i)))");
  CHECK_THROWS_AS(sigma::f_and_all({}), StructureError);
}

TEST_CASE("numerals build and evaluate to their value") {
  const sigma::Environment empty;
  for (uint64_t n : {0ull, 1ull, 2ull, 3ull, 5ull, 8ull, 13ull, 100ull})
    CHECK(sigma::eval_term(sigma::t_num(n), empty) == n);
}

TEST_CASE("evaluation matches hand-computed examples") {
  sigma::Environment env;
  env.strvals["X"] = StringValue::parse01("101");  // {0,2}, length 3
  env.numvals["x"] = 2;

  CHECK(sigma::eval_term(sigma::parse_term("(len X)"), env) == 3);
  CHECK(sigma::eval_term(sigma::parse_term("(+ x (len X))"), env) == 5);
  CHECK(sigma::eval_term(sigma::parse_term("(* x x)"), env) == 4);

  CHECK(sigma::eval_formula(sigma::parse_formula("(in X 0)"), env));
  CHECK_FALSE(sigma::eval_formula(sigma::parse_formula("(in X 1)"), env));
  CHECK(sigma::eval_formula(sigma::parse_formula("(in X x)"), env));
  CHECK_FALSE(sigma::eval_formula(sigma::parse_formula("(in X (len X))"), env));
  CHECK(sigma::eval_formula(sigma::parse_formula("(<= (+ 1 1) (len X))"), env));
  CHECK(sigma::eval_formula(sigma::parse_formula("(all i (len X) (imp (in X i) (<= i (len X))))"), env));
  CHECK(sigma::eval_formula(sigma::parse_formula("(ex i (len X) (in X i))"), env));
  CHECK_FALSE(sigma::eval_formula(sigma::parse_formula("(all i (len X) (in X i))"), env));
}

TEST_CASE("evaluation raises on unbound variables and overflow") {
  sigma::Environment env;
  CHECK_THROWS_AS(sigma::eval_term(sigma::parse_term("y"), env), EvalError);
  CHECK_THROWS_AS(sigma::eval_term(sigma::parse_term("(len X)"), env), EvalError);
  CHECK_THROWS_AS(sigma::eval_formula(sigma::parse_formula("(in X 0)"), env), EvalError);

  env.numvals["big"] = uint64_t{1} << 63;
  CHECK_THROWS_AS(sigma::eval_term(sigma::parse_term("(+ big big)"), env), EvalError);
  CHECK_THROWS_AS(sigma::eval_term(sigma::parse_term("(* big big)"), env), EvalError);
  // One below the edge still evaluates.
  env.numvals["big"] = (uint64_t{1} << 63) - 1;
  CHECK(sigma::eval_term(sigma::parse_term("(+ big big)"), env) == UINT64_MAX - 1);
}

TEST_CASE("free variables split by sort and skip bound ones") {
  const sigma::FreeVars fv = sigma::free_variables(
      sigma::parse_formula("(all i (len X) (imp (in X i) (<= i j)))"));
  CHECK(fv.nums == std::set<std::string>{"j"});
  CHECK(fv.strs == std::set<std::string>{"X"});

  const sigma::FreeVars closed = sigma::free_variables(
      sigma::parse_formula("(all i 1 (ex j i (<= j i)))"));
  CHECK(closed.nums.empty());
  CHECK(closed.strs.empty());

  // A variable free in the bound term stays free.
  const sigma::FreeVars inbound =
      sigma::free_variables(sigma::parse_formula("(all i k (= i i))"));
  CHECK(inbound.nums == std::set<std::string>{"k"});
}

TEST_CASE("evaluator agrees with an independent reference on the corpus") {
  std::mt19937 rng(20260815);
  for (const std::string& text : corpus_texts()) {
    const FormulaPtr f = sigma::parse_formula(text);
    const sigma::FreeVars fv = sigma::free_variables(f);
    for (int trial = 0; trial < 8; ++trial) {
      RefEnv env;
      for (const std::string& var : fv.strs) {
        std::set<uint64_t> elems;
        const uint64_t len = rng() % 7;
        if (len > 0) {
          elems.insert(len - 1);
          for (uint64_t e = 0; e + 1 < len; ++e)
            if (rng() % 2) elems.insert(e);
        }
        env.strs[var] = elems;
      }
      sigma::Environment lib = to_environment(env);
      CHECK(sigma::eval_formula(f, lib) == ref_formula(f, env));
    }
  }
}

TEST_CASE("balanced list builders preserve list semantics") {
  std::vector<FormulaPtr> parts;
  for (int i = 0; i < 5; ++i)
    parts.push_back(sigma::f_in("X", sigma::t_num(static_cast<uint64_t>(i))));
  const FormulaPtr conj = sigma::f_and_all(parts);
  const FormulaPtr disj = sigma::f_or_all(parts);
  sigma::Environment env;
  env.strvals["X"] = StringValue::parse01("10101");
  CHECK_FALSE(sigma::eval_formula(conj, env));
  CHECK(sigma::eval_formula(disj, env));
  env.strvals["X"] = StringValue::parse01("11111");
  CHECK(sigma::eval_formula(conj, env));
  const FormulaPtr one = sigma::f_or_all({parts[0]});
  CHECK(sigma::equal(one, parts[0]));

  const FormulaPtr iff = sigma::f_iff(parts[0], parts[1]);
  CHECK(sigma::render(iff) ==
        "(and (imp (in X 0) (in X 1)) (imp (in X 1) (in X 0)))");
}
