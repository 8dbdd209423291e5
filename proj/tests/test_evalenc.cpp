#include "reduct/evalenc.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "reduct/errors.hpp"
#include "reduct/proofs.hpp"
#include "reduct/prop.hpp"
#include "reduct/sigma.hpp"
#include "reduct/strings.hpp"
#include "reduct/translate.hpp"

namespace {

using namespace reduct;
using prop::Formula;

Formula q(uint64_t i) { return prop::f_atom(prop::Atom::named(i)); }

Formula random_formula(std::mt19937& rng, int depth, int natoms) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 2);
  switch (pick(rng)) {
    case 0:
      return q(1 + rng() % natoms);
    case 1:
      return prop::f_true();
    case 2:
      return prop::f_false();
    case 3:
      return prop::f_not(random_formula(rng, depth - 1, natoms));
    case 4:
      return prop::f_and(random_formula(rng, depth - 1, natoms),
                         random_formula(rng, depth - 1, natoms));
    case 5:
      return prop::f_or(random_formula(rng, depth - 1, natoms),
                        random_formula(rng, depth - 1, natoms));
    default:
      return prop::f_imp(random_formula(rng, depth - 1, natoms),
                         random_formula(rng, depth - 1, natoms));
  }
}

// Relabels the atoms of f to the contiguous block q1..qm that the string
// encoding requires, keeping their relative order.
Formula contiguous(Formula f) {
  std::map<prop::Atom, Formula> relabel;
  uint64_t next = 1;
  for (const prop::Atom& a : prop::atoms(f)) relabel[a] = q(next++);
  return prop::substitute(f, relabel);
}

prop::Assignment random_assignment(std::mt19937& rng, Formula f) {
  prop::Assignment a;
  for (const prop::Atom& at : prop::atoms(f)) a[at] = (rng() & 1) != 0;
  return a;
}

// Hand-assembled encodings for the strict-decode tests.
std::string header_bits(uint32_t n) {
  std::string s;
  for (int i = 0; i < 16; ++i) s += ((n >> i) & 1) ? '1' : '0';
  return s;
}

std::string record_bits(uint32_t kind, uint32_t a, uint32_t b) {
  std::string s;
  for (int i = 0; i < 4; ++i) s += ((kind >> i) & 1) ? '1' : '0';
  for (int i = 0; i < 8; ++i) s += ((a >> i) & 1) ? '1' : '0';
  for (int i = 0; i < 8; ++i) s += ((b >> i) & 1) ? '1' : '0';
  return s;
}

constexpr uint32_t kFalse = 0, kTrue = 1, kAtom = 2, kNot = 3, kAnd = 4;

}  // namespace

TEST_CASE("encode_order lists the root first and children after parents") {
  const Formula f = prop::parse_formula("(> (& q1 q2) (& q1 q2))");
  const std::vector<Formula> order = evalenc::encode_order(f);
  REQUIRE(order.size() == 4);
  CHECK(order[0] == f);
  CHECK(order[1] == prop::parse_formula("(& q1 q2)"));
  CHECK(order[2] == q(2));
  CHECK(order[3] == q(1));

  std::mt19937 rng(701);
  for (int trial = 0; trial < 50; ++trial) {
    const Formula g = contiguous(random_formula(rng, 4, 3));
    const std::vector<Formula> ord = evalenc::encode_order(g);
    REQUIRE(!ord.empty());
    CHECK(ord[0] == g);
    std::map<const prop::Node*, size_t> pos;
    for (size_t i = 0; i < ord.size(); ++i) {
      CHECK(pos.emplace(ord[i].node(), i).second);  // no duplicates
    }
    for (size_t i = 0; i < ord.size(); ++i) {
      const prop::Op op = ord[i].op();
      if (op == prop::Op::Not || op == prop::Op::And || op == prop::Op::Or ||
          op == prop::Op::Imp)
        CHECK(pos.at(ord[i].left().node()) > i);
      if (op == prop::Op::And || op == prop::Op::Or || op == prop::Op::Imp)
        CHECK(pos.at(ord[i].right().node()) > i);
    }
  }
}

TEST_CASE("the encoding of single atoms matches the documented layout") {
  const Formula q0 = prop::f_atom(prop::Atom::named(uint64_t{0}));
  CHECK(evalenc::encode_formula(q0).to01() ==
        "1000000000000000"
        "01000000000000000000"
        "1");
  CHECK(evalenc::encode_formula(prop::f_not(q0)).to01() ==
        "0100000000000000"
        "11001000000000000000"
        "01000000000000000000"
        "1");
  // Length follows directly from the node count.
  const Formula chain = prop::f_and_all({q(1), q(2), q(3)});
  CHECK(evalenc::encode_formula(chain).length() ==
        16 + 20 * prop::node_count(chain) + 1);
}

TEST_CASE("decoding inverts encoding for random formulas") {
  std::mt19937 rng(702);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = contiguous(random_formula(rng, 4, 4));
    const StringValue bits = evalenc::encode_formula(f);
    CHECK(bits.length() == 16 + 20 * prop::node_count(f) + 1);
    CHECK(evalenc::decode_formula(bits, 1) == f);
  }
  // A zero-based atom block decodes back with atom_base 0.
  const Formula z = prop::f_or(prop::f_atom(prop::Atom::named(uint64_t{0})), q(1));
  CHECK(evalenc::decode_formula(evalenc::encode_formula(z), 0) == z);
}

TEST_CASE("encoding rejects non-contiguous or non-named atoms and huge trees") {
  CHECK_THROWS_AS(evalenc::encode_formula(prop::parse_formula("(& q1 q3)")),
                  StructureError);
  CHECK_THROWS_AS(evalenc::encode_formula(prop::parse_formula("(~ pX.0)")),
                  StructureError);
  CHECK_THROWS_AS(evalenc::encode_formula(prop::parse_formula("q7")), StructureError);

  std::vector<Formula> atoms128, atoms129;
  for (uint64_t i = 1; i <= 129; ++i) {
    if (i <= 128) atoms128.push_back(q(i));
    atoms129.push_back(q(i));
  }
  // 128 leaves make 255 distinct nodes, exactly the cap; 129 go past it.
  CHECK(evalenc::encode_formula(prop::f_and_all(atoms128)).length() ==
        16 + 20 * 255 + 1);
  CHECK_THROWS_AS(evalenc::encode_formula(prop::f_and_all(atoms129)), StructureError);
}

TEST_CASE("decoding is strict about every malformation") {
  const std::string good = header_bits(2) + record_bits(kNot, 1, 0) +
                           record_bits(kAtom, 0, 0) + "1";
  CHECK(prop::render(evalenc::decode_formula(StringValue::parse01(good), 1)) ==
        "(~ q1)");

  auto reject = [](const std::string& bits) {
    CHECK_THROWS_AS(evalenc::decode_formula(StringValue::parse01(bits), 1),
                    StructureError);
  };
  // Sentinel cut off: the length is no longer on the record grid.
  reject(good.substr(0, good.size() - 1));
  // Header claims two records but only one follows.
  reject(header_bits(2) + record_bits(kAtom, 0, 0) + "1");
  // Unknown kind code 7.
  reject(header_bits(1) + record_bits(7, 0, 0) + "1");
  // Child index past the node count.
  reject(header_bits(1) + record_bits(kNot, 5, 0) + "1");
  // Child index not strictly after the parent.
  reject(header_bits(2) + record_bits(kNot, 0, 0) + record_bits(kAtom, 0, 0) + "1");
  // Unused fields must stay zero.
  reject(header_bits(1) + record_bits(kTrue, 3, 0) + "1");
  reject(header_bits(2) + record_bits(kNot, 1, 9) + record_bits(kAtom, 0, 0) + "1");
  // Duplicate records break canonicity.
  reject(header_bits(3) + record_bits(kAnd, 1, 2) + record_bits(kAtom, 0, 0) +
         record_bits(kAtom, 0, 0) + "1");
  // Node 1 is unreachable from the root.
  reject(header_bits(2) + record_bits(kTrue, 0, 0) + record_bits(kAtom, 0, 0) + "1");
  // Atom ranks must start at zero with no gaps.
  reject(header_bits(2) + record_bits(kNot, 1, 0) + record_bits(kAtom, 1, 0) + "1");
  // A sentinel of zero never happens: parse01 trims it, changing the length.
  reject(good.substr(0, good.size() - 1) + "0");
  // The empty string is not an encoding.
  reject("");
}

TEST_CASE("evaluation traces list one truth value per node plus the sentinel") {
  // Node order after the root is right subtree first: [&, ~q2, q2, q1].
  const Formula f = prop::parse_formula("(& q1 (~ q2))");
  const prop::Assignment a = {{prop::Atom::named(uint64_t{1}), true},
                              {prop::Atom::named(uint64_t{2}), false}};
  CHECK(evalenc::compute_eval_trace(f, a).to01() == "11011");

  std::mt19937 rng(703);
  for (int trial = 0; trial < 500; ++trial) {
    const Formula g = contiguous(random_formula(rng, 4, 3));
    const prop::Assignment b = random_assignment(rng, g);
    const StringValue trace = evalenc::compute_eval_trace(g, b);
    const std::vector<Formula> order = evalenc::encode_order(g);
    REQUIRE(trace.length() == order.size() + 1);
    CHECK(trace.bit(order.size()));
    CHECK(trace.bit(0) == prop::eval_prop(g, b));
    // Each position carries the value of its own node.
    for (size_t i = 0; i < order.size(); ++i)
      CHECK(trace.bit(i) == prop::eval_prop(order[i], b));
  }
}

TEST_CASE("the evaluation formula pins Z to the exact trace") {
  const sigma::FormulaPtr eval = evalenc::generate_eval();
  const sigma::FreeVars fv = sigma::free_variables(eval);
  CHECK(fv.nums.empty());
  CHECK(fv.strs == std::set<std::string>{"X", "Y", "Z"});

  const std::vector<const char*> samples = {
      "q1",          "(~ q1)",          "(& q1 q2)",       "(| q1 (~ q2))",
      "(> q1 q2)",   "(> (& q1 q2) q1)", "(| (~ q1) T)",    "(& q1 F)",
  };
  std::mt19937 rng(704);
  for (const char* text : samples) {
    const Formula f = prop::parse_formula(text);
    for (int trial = 0; trial < 2; ++trial) {
      const prop::Assignment a = random_assignment(rng, f);
      sigma::Environment env;
      env.strvals["X"] = evalenc::assignment_bits(prop::atoms(f), a);
      env.strvals["Y"] = evalenc::encode_formula(f);
      const StringValue trace = evalenc::compute_eval_trace(f, a);
      env.strvals["Z"] = trace;
      CHECK(sigma::eval_formula(eval, env));
      // Any single wrong value bit is caught.
      for (uint64_t i = 0; i + 1 < trace.length(); ++i) {
        sigma::Environment bad = env;
        bad.strvals["Z"].flip(i);
        CHECK_FALSE(sigma::eval_formula(eval, bad));
      }
    }
  }
}

TEST_CASE("profiles and packed assignments follow the sentinel convention") {
  const translate::LengthProfile prof = evalenc::eval_profile(2, 7);
  CHECK(prof.lengths == std::map<std::string, uint64_t>{
                            {"X", 3}, {"Y", 16 + 20 * 7 + 1}, {"Z", 8}});
  CHECK(prof.numvals.empty());

  const std::vector<prop::Atom> order = {prop::Atom::named(uint64_t{1}),
                                         prop::Atom::named(uint64_t{2})};
  const prop::Assignment a = {{order[0], false}, {order[1], true}};
  CHECK(evalenc::assignment_bits(order, a).to01() == "011");
  CHECK(evalenc::assignment_bits({}, {}).to01() == "1");
  CHECK_THROWS_AS(evalenc::assignment_bits(order, {{order[0], true}}), EvalError);
}

TEST_CASE("pipeline substitutions cover exactly the non-sentinel bits") {
  const auto bitsig = evalenc::bit_substitution("X", StringValue::parse01("101"));
  REQUIRE(bitsig.size() == 2);
  CHECK(bitsig.at(prop::Atom::string_bit("X", 0)) == prop::f_true());
  CHECK(bitsig.at(prop::Atom::string_bit("X", 1)) == prop::f_false());
  CHECK(evalenc::bit_substitution("X", StringValue()).empty());

  // X bits follow atom rank; Z bits follow the encoding node order.
  const Formula f = prop::parse_formula("(& q1 q2)");
  const auto xz = evalenc::xz_substitution(f);
  CHECK(xz.at(prop::Atom::string_bit("X", 0)) == q(1));
  CHECK(xz.at(prop::Atom::string_bit("X", 1)) == q(2));
  CHECK(xz.at(prop::Atom::string_bit("Z", 0)) == f);
  CHECK(xz.at(prop::Atom::string_bit("Z", 1)) == q(2));
  CHECK(xz.at(prop::Atom::string_bit("Z", 2)) == q(1));
  CHECK(xz.size() == 5);
}

TEST_CASE("the residual antecedent is provable and proved") {
  const std::vector<const char*> samples = {"q1", "(> q1 q2)", "(& q1 (| q2 q3))"};
  for (const char* text : samples) {
    const Formula f = prop::parse_formula(text);
    const Formula prime = evalenc::eval_prime_formula(f);
    REQUIRE(prime);

    // Semantically a tautology: true under every assignment of its atoms.
    const std::vector<prop::Atom> at = prop::atoms(prime);
    REQUIRE(at.size() <= 8);
    for (uint64_t bits = 0; bits < (uint64_t{1} << at.size()); ++bits) {
      prop::Assignment a;
      for (size_t j = 0; j < at.size(); ++j) a[at[j]] = (bits >> j) & 1;
      CHECK(prop::eval_prop(prime, a));
    }

    const proofs::Proof p = evalenc::prove_eval_prime(f);
    CHECK(p.premises.empty());
    CHECK(p.conclusion() == prime);
    CHECK(proofs::check_proof(p).accepted);
  }
}

TEST_CASE("antecedent proofs grow about linearly with the statement") {
  std::vector<double> lx, ly;
  for (uint64_t k = 2; k <= 8; ++k) {
    std::vector<Formula> atoms;
    for (uint64_t i = 1; i <= k; ++i) atoms.push_back(q(i));
    const Formula f = prop::f_and_all(atoms);
    const Formula prime = evalenc::eval_prime_formula(f);
    const uint64_t proof = proofs::proof_size(evalenc::prove_eval_prime(f));
    lx.push_back(std::log(static_cast<double>(prime.symbol_size())));
    ly.push_back(std::log(static_cast<double>(proof)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lx.size());
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope < 2.0);
  CHECK(slope > 0.0);
}
