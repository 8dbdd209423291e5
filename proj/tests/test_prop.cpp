#include "reduct/prop.hpp"

#include <cstdint>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "reduct/errors.hpp"
#include "reduct/taut.hpp"

namespace {

using namespace reduct;
using prop::Formula;

Formula q(uint64_t i) { return prop::f_atom(prop::Atom::named(i)); }

// Random formula over q1..q`natoms`, with constants mixed in when asked.
Formula random_formula(std::mt19937& rng, int depth, int natoms,
                       bool constants) {
  const int leaf_kinds = constants ? 4 : 2;
  if (depth == 0 || rng() % 4 == 0) {
    switch (rng() % leaf_kinds) {
      case 0:
      case 1: return q(1 + rng() % natoms);
      case 2: return prop::f_true();
      default: return prop::f_false();
    }
  }
  switch (rng() % 4) {
    case 0: return prop::f_not(random_formula(rng, depth - 1, natoms, constants));
    case 1:
      return prop::f_and(random_formula(rng, depth - 1, natoms, constants),
                         random_formula(rng, depth - 1, natoms, constants));
    case 2:
      return prop::f_or(random_formula(rng, depth - 1, natoms, constants),
                        random_formula(rng, depth - 1, natoms, constants));
    default:
      return prop::f_imp(random_formula(rng, depth - 1, natoms, constants),
                         random_formula(rng, depth - 1, natoms, constants));
  }
}

prop::Assignment assignment_for(Formula f, uint64_t bits) {
  return taut::assignment_from_bits(prop::atoms(f), bits);
}

}  // namespace

TEST_CASE("interning makes structural equality pointer equality") {
  const Formula a = prop::f_and(q(1), q(2));
  const Formula b = prop::f_and(q(1), q(2));
  CHECK(a.node() == b.node());
  CHECK(a == b);
  CHECK(a != prop::f_and(q(2), q(1)));
  CHECK(prop::parse_formula("(> q1 (~ q2))") ==
        prop::parse_formula("(> q1 (~ q2))"));
  CHECK_FALSE(Formula()); // default handle is empty
  CHECK(prop::f_const(true) == prop::f_true());
  CHECK(prop::f_const(false) == prop::f_false());
}

TEST_CASE("atom ordering puts string bits first and named atoms numeric") {
  const prop::Atom px0 = prop::Atom::string_bit("X", 0);
  const prop::Atom px1 = prop::Atom::string_bit("X", 1);
  const prop::Atom py0 = prop::Atom::string_bit("Y", 0);
  const prop::Atom q2 = prop::Atom::named(uint64_t{2});
  const prop::Atom q10 = prop::Atom::named(uint64_t{10});
  CHECK(px0 < px1);
  CHECK(px1 < py0);
  CHECK(py0 < q2);
  CHECK(q2 < q10);  // numeric, not lexicographic
  CHECK(px0.text() == "pX.0");
  CHECK(q10.text() == "q10");

  const Formula f = prop::f_and(prop::f_atom(q10),
                                prop::f_and(prop::f_atom(q2), prop::f_atom(px1)));
  const std::vector<prop::Atom> order = prop::atoms(f);
  REQUIRE(order.size() == 3);
  CHECK(order[0] == px1);
  CHECK(order[1] == q2);
  CHECK(order[2] == q10);
}

TEST_CASE("evaluation follows the classical tables and flags missing atoms") {
  prop::Assignment a{{prop::Atom::named(uint64_t{1}), true},
                     {prop::Atom::named(uint64_t{2}), false}};
  CHECK(prop::eval_prop(prop::parse_formula("T"), a));
  CHECK_FALSE(prop::eval_prop(prop::parse_formula("F"), a));
  CHECK(prop::eval_prop(prop::parse_formula("(| q1 q2)"), a));
  CHECK_FALSE(prop::eval_prop(prop::parse_formula("(& q1 q2)"), a));
  CHECK_FALSE(prop::eval_prop(prop::parse_formula("(> q1 q2)"), a));
  CHECK(prop::eval_prop(prop::parse_formula("(> q2 q1)"), a));
  CHECK(prop::eval_prop(prop::parse_formula("(~ q2)"), a));
  CHECK_THROWS_AS(prop::eval_prop(prop::parse_formula("q3"), a), EvalError);
}

TEST_CASE("substitution commutes with evaluation") {
  std::mt19937 rng(411);
  for (int trial = 0; trial < 200; ++trial) {
    const Formula f = random_formula(rng, 5, 3, false);
    std::map<prop::Atom, prop::Formula> sigma;
    for (uint64_t i = 1; i <= 3; ++i)
      if (rng() % 2) sigma[prop::Atom::named(i)] = random_formula(rng, 2, 3, true);
    const Formula g = prop::substitute(f, sigma);
    const prop::Assignment a = assignment_for(prop::f_and(prop::f_and(q(1), q(2)), q(3)),
                                              rng() % 8);
    prop::Assignment composed;
    for (const auto& [atom, value] : a) {
      auto it = sigma.find(atom);
      composed[atom] = it == sigma.end() ? value : prop::eval_prop(it->second, a);
    }
    CHECK(prop::eval_prop(g, a) == prop::eval_prop(f, composed));
  }
}

TEST_CASE("identity substitution returns the identical handle") {
  const Formula f = prop::parse_formula("(> (& q1 q2) (| q1 (~ q2)))");
  CHECK(prop::substitute(f, {}).node() == f.node());
  std::map<prop::Atom, prop::Formula> sigma{{prop::Atom::named(uint64_t{1}), q(1)}};
  CHECK(prop::substitute(f, sigma).node() == f.node());
  sigma[prop::Atom::named(uint64_t{1})] = prop::f_not(q(1));
  CHECK(prop::substitute(f, sigma) ==
        prop::parse_formula("(> (& (~ q1) q2) (| (~ q1) (~ q2)))"));
}

TEST_CASE("subformulas lists the root first without duplicates") {
  const Formula dup = prop::parse_formula("(> (& q1 q2) (& q1 q2))");
  const std::vector<Formula> subs = prop::subformulas(dup);
  REQUIRE(subs.size() == 4);
  CHECK(subs[0] == dup);
  CHECK(subs[1] == prop::parse_formula("(& q1 q2)"));
  CHECK(subs[2] == q(1));
  CHECK(subs[3] == q(2));
  CHECK(prop::node_count(dup) == 4);
  // Fully expanded symbol count ignores sharing.
  CHECK(dup.symbol_size() == 7);
}

TEST_CASE("fold_step applies exactly the constant absorption table") {
  const Formula b = q(7);
  const Formula T = prop::f_true(), F = prop::f_false();
  CHECK(prop::fold_step(prop::Op::Not, T, Formula()) == F);
  CHECK(prop::fold_step(prop::Op::Not, F, Formula()) == T);
  CHECK(prop::fold_step(prop::Op::And, T, b) == b);
  CHECK(prop::fold_step(prop::Op::And, b, T) == b);
  CHECK(prop::fold_step(prop::Op::And, F, b) == F);
  CHECK(prop::fold_step(prop::Op::And, b, F) == F);
  CHECK(prop::fold_step(prop::Op::Or, T, b) == T);
  CHECK(prop::fold_step(prop::Op::Or, b, T) == T);
  CHECK(prop::fold_step(prop::Op::Or, F, b) == b);
  CHECK(prop::fold_step(prop::Op::Or, b, F) == b);
  CHECK(prop::fold_step(prop::Op::Imp, T, b) == b);
  CHECK(prop::fold_step(prop::Op::Imp, b, T) == T);
  CHECK(prop::fold_step(prop::Op::Imp, F, b) == T);
  CHECK(prop::fold_step(prop::Op::Imp, b, F) == prop::f_not(b));
  // No rule: the plain combination comes back.
  CHECK(prop::fold_step(prop::Op::And, b, q(8)) == prop::f_and(b, q(8)));
}

TEST_CASE("fold_constants pushes constants to the root and preserves meaning") {
  CHECK(prop::fold_constants(prop::parse_formula("(& q1 (| T q2))")) == q(1));
  CHECK(prop::fold_constants(prop::parse_formula("(> q1 (& q2 F))")) ==
        prop::parse_formula("(~ q1)"));
  CHECK(prop::fold_constants(prop::parse_formula("(~ (| F F))")) == prop::f_true());

  std::mt19937 rng(412);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = random_formula(rng, 5, 3, true);
    const Formula g = prop::fold_constants(f);
    CHECK(prop::fold_constants(g) == g);
    // Constants only at the root afterwards.
    for (size_t i = 1; i < prop::subformulas(g).size(); ++i)
      CHECK_FALSE(prop::const_value(prop::subformulas(g)[i]).has_value());
    for (uint64_t bits = 0; bits < 8; ++bits) {
      const prop::Assignment a =
          assignment_for(prop::f_and(prop::f_and(q(1), q(2)), q(3)), bits);
      CHECK(prop::eval_prop(f, a) == prop::eval_prop(g, a));
    }
  }
}

TEST_CASE("const_value reports only genuine constants") {
  CHECK(prop::const_value(prop::f_true()) == true);
  CHECK(prop::const_value(prop::f_false()) == false);
  CHECK_FALSE(prop::const_value(q(1)).has_value());
  CHECK_FALSE(prop::const_value(prop::parse_formula("(& T T)")).has_value());
}

TEST_CASE("formula parsing round trips and rejects malformed text") {
  std::mt19937 rng(413);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = random_formula(rng, 5, 3, true);
    CHECK(prop::parse_formula(prop::render(f)) == f);
  }
  CHECK(prop::render(prop::parse_formula("(> pX.0 (| q1 T))")) ==
        "(> pX.0 (| q1 T))");

  for (const char* bad : {"", "(", "()", "(& q1)", "(& q1 q2 q3)", "(? q1 q2)",
                          "q1 q2", "(~ q1) extra", "p", "pX", "pX.", "(>q1 q2)"})
    CHECK_THROWS_AS(prop::parse_formula(bad), ParseError);

  size_t consumed = 0;
  const Formula head = prop::parse_formula_prefix("(~ q1) (| q2 q3)", &consumed);
  CHECK(head == prop::f_not(q(1)));
  CHECK(consumed == 6);

  CHECK(prop::parse_atom("pX.3") == prop::Atom::string_bit("X", 3));
  CHECK(prop::parse_atom("q12") == prop::Atom::named(uint64_t{12}));
  CHECK_THROWS_AS(prop::parse_atom("T"), ParseError);
}

TEST_CASE("tautology oracle decides pinned examples with smallest witnesses") {
  CHECK(taut::is_tautology_bruteforce(prop::parse_formula("(| q1 (~ q1))")));
  CHECK(taut::is_tautology_bruteforce(prop::parse_formula("(> q1 q1)")));
  CHECK(taut::is_tautology_bruteforce(prop::parse_formula("(> (& q1 q2) q1)")));
  CHECK(taut::is_tautology_bruteforce(
      prop::parse_formula("(> (> (> q1 q2) q1) q1)")));
  CHECK_FALSE(taut::is_tautology_bruteforce(prop::parse_formula("(& q1 (~ q1))")));

  std::optional<uint64_t> cex;
  CHECK_FALSE(taut::is_tautology_bruteforce(q(1), &cex));
  CHECK(cex == 0);  // q1 = false is assignment index 0

  // Atoms sort as [q1, q2]; the smallest falsifying index sets q1 only.
  CHECK_FALSE(taut::is_tautology_bruteforce(prop::parse_formula("(> q1 q2)"), &cex));
  CHECK(cex == 1);

  // A constant needs no atoms at all.
  CHECK(taut::is_tautology_bruteforce(prop::f_true()));
  CHECK_FALSE(taut::is_tautology_bruteforce(prop::f_false(), &cex));
  CHECK(cex == 0);
}

TEST_CASE("compiled evaluation matches the tree walker") {
  std::mt19937 rng(414);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = random_formula(rng, 5, 4, true);
    const taut::CompiledEval ce(f);
    CHECK(ce.num_atoms() == prop::atoms(f).size());
    for (int probes = 0; probes < 8; ++probes) {
      const uint64_t bits = rng() & ((uint64_t{1} << ce.num_atoms()) - 1);
      CHECK(ce.run(bits) ==
            prop::eval_prop(f, taut::assignment_from_bits(ce.atom_order(), bits)));
    }
  }
}

TEST_CASE("serial and parallel counterexample scans agree exactly") {
  std::mt19937 rng(415);
  for (int trial = 0; trial < 60; ++trial) {
    const Formula f = random_formula(rng, 6, 10, false);
    const taut::CompiledEval ce(f);
    CHECK(taut::find_counterexample_serial(ce) ==
          taut::find_counterexample_parallel(ce));
  }
  // And through the oracle entry point.
  const Formula g = prop::parse_formula("(> (& q1 q2) (& q2 q3))");
  std::optional<uint64_t> serial_cex, parallel_cex;
  CHECK(taut::is_tautology_bruteforce(g, &serial_cex, false) ==
        taut::is_tautology_bruteforce(g, &parallel_cex, true));
  CHECK(serial_cex == parallel_cex);
}

TEST_CASE("the oracle cap trips at 21 atoms and follows the environment") {
  Formula wide = q(1);
  for (uint64_t i = 2; i <= 21; ++i) wide = prop::f_and(wide, q(i));
  wide = prop::f_imp(wide, q(1));  // a 21-atom tautology
  CHECK(taut::atom_cap() == 20);
  CHECK_THROWS_AS(taut::is_tautology_bruteforce(wide), CapExceeded);

  REQUIRE(setenv("REDUCT_ATOM_CAP", "22", 1) == 0);
  CHECK(taut::atom_cap() == 22);
  CHECK(taut::is_tautology_bruteforce(wide));

  // Values outside 1..62 fall back to the default.
  REQUIRE(setenv("REDUCT_ATOM_CAP", "0", 1) == 0);
  CHECK(taut::atom_cap() == 20);
  REQUIRE(setenv("REDUCT_ATOM_CAP", "63", 1) == 0);
  CHECK(taut::atom_cap() == 20);
  REQUIRE(setenv("REDUCT_ATOM_CAP", "junk", 1) == 0);
  CHECK(taut::atom_cap() == 20);
  REQUIRE(unsetenv("REDUCT_ATOM_CAP") == 0);
  CHECK(taut::atom_cap() == 20);
}
