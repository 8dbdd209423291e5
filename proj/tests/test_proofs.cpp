#include "reduct/proofs.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "reduct/circuits.hpp"
#include "reduct/errors.hpp"
#include "reduct/prop.hpp"
#include "reduct/prover.hpp"
#include "reduct/taut.hpp"

namespace {

using namespace reduct;
using prop::Formula;

Formula q(uint64_t i) { return prop::f_atom(prop::Atom::named(i)); }

std::string fixture_text() {
  std::ifstream in(REDUCT_SOURCE_DIR "/tests/data/excluded_middle_q1.proof");
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("the schema table carries exactly the thirteen patterns") {
  const auto& schemas = proofs::axiom_schemas();
  REQUIRE(schemas.size() == 13);
  const std::map<std::string, std::string> expected = {
      {"k", "(> qp (> qq qp))"},
      {"s", "(> (> qp (> qq qr)) (> (> qp qq) (> qp qr)))"},
      {"and-i", "(> qp (> qq (& qp qq)))"},
      {"and-e1", "(> (& qp qq) qp)"},
      {"and-e2", "(> (& qp qq) qq)"},
      {"or-i1", "(> qp (| qp qq))"},
      {"or-i2", "(> qq (| qp qq))"},
      {"or-e", "(> (> qp qr) (> (> qq qr) (> (| qp qq) qr)))"},
      {"neg-i", "(> (> qp qq) (> (> qp (~ qq)) (~ qp)))"},
      {"dneg-e", "(> (~ (~ qp)) qp)"},
      {"efq", "(> qp (> (~ qp) qq))"},
      {"truth", "T"},
      {"nonfalsity", "(~ F)"},
  };
  for (const auto& [name, pattern] : schemas) {
    REQUIRE(expected.count(name) == 1);
    CHECK(prop::render(pattern) == expected.at(name));
    CHECK(proofs::schema_pattern(name) == pattern);
    // Every schema is its own instance.
    CHECK(proofs::is_schema_instance(name, pattern));
  }
  CHECK_FALSE(proofs::schema_pattern("modus-ponens"));
}

TEST_CASE("schema instances demand one consistent binding") {
  CHECK(proofs::is_schema_instance("k", prop::parse_formula("(> q1 (> q2 q1))")));
  // p and q may bind the same formula.
  CHECK(proofs::is_schema_instance("k", prop::parse_formula("(> q1 (> q1 q1))")));
  // Compound instances are instances too.
  CHECK(proofs::is_schema_instance(
      "k", prop::parse_formula("(> (& q1 q2) (> (~ q3) (& q1 q2)))")));
  // The two occurrences of p must agree.
  CHECK_FALSE(proofs::is_schema_instance("k", prop::parse_formula("(> q1 (> q2 q2))")));
  CHECK_FALSE(proofs::is_schema_instance("dneg-e", prop::parse_formula("(> (~ q1) q1)")));
  CHECK(proofs::is_schema_instance("efq", prop::parse_formula("(> q2 (> (~ q2) F))")));
  CHECK(proofs::is_schema_instance("truth", prop::f_true()));
  CHECK_FALSE(proofs::is_schema_instance("truth", q(1)));
}

TEST_CASE("the excluded middle fixture checks and pins its size") {
  const proofs::Proof p = proofs::parse_proof(fixture_text());
  CHECK(p.premises.empty());
  CHECK(p.lines.size() == 23);
  CHECK(p.conclusion() == prop::parse_formula("(| q1 (~ q1))"));
  const proofs::Verdict v = proofs::check_proof(p);
  CHECK(v.accepted);
  CHECK(v.reason.empty());
  CHECK(proofs::proof_size(p) == 398);

  SUBCASE("the parallel checker returns the same verdict") {
    proofs::CheckOptions opts;
    opts.parallel = true;
    CHECK(proofs::check_proof(p, {}, {}, opts).accepted);
  }
  SUBCASE("rendering and reparsing is stable") {
    const std::string once = proofs::render_proof(p);
    const proofs::Proof again = proofs::parse_proof(once);
    CHECK(proofs::render_proof(again) == once);
    CHECK(proofs::check_proof(again).accepted);
    CHECK(again.conclusion() == p.conclusion());
  }
}

TEST_CASE("the checker names the first failing line and reason") {
  struct Case {
    const char* text;
    proofs::Verdict::Where where;
    uint64_t at;
    const char* reason;
  };
  const std::vector<Case> cases = {
      {"LINE 1 (> q1 q1) AX k", proofs::Verdict::Where::Line, 1, "axiom-mismatch"},
      {"LINE 1 T AX zap", proofs::Verdict::Where::Line, 1, "unknown-schema"},
      {"LINE 1 T AX truth\nLINE 2 q1 MP 1 1", proofs::Verdict::Where::Line, 2,
       "mp-shape"},
      {"LINE 1 T AX truth\nLINE 2 T MP 1 5", proofs::Verdict::Where::Line, 2,
       "bad-ref"},
      {"LINE 1 q1 MP 1 1", proofs::Verdict::Where::Line, 1, "bad-ref"},
      {"LINE 2 T AX truth\nLINE 1 T AX truth", proofs::Verdict::Where::Line, 1,
       "id-order"},
      {"LINE 1 q1 PREM 0", proofs::Verdict::Where::Line, 1, "premise-range"},
      {"", proofs::Verdict::Where::None, 0, "empty"},
  };
  for (const Case& c : cases) {
    const proofs::Verdict v = proofs::check_proof(proofs::parse_proof(c.text));
    CHECK_FALSE(v.accepted);
    CHECK(v.where == c.where);
    CHECK(v.at == c.at);
    CHECK(v.reason == c.reason);
  }

  // MP must cite the antecedent and the implication in that order.
  const proofs::Proof flipped = proofs::parse_proof(
      "LINE 1 T AX truth\n"
      "LINE 2 (> T (> T T)) AX k\n"
      "LINE 3 (> T T) MP 2 1");
  CHECK(proofs::check_proof(flipped).reason == "mp-shape");
}

TEST_CASE("declared premises must be on the allowed list") {
  const proofs::Proof p = proofs::parse_proof(
      "PREMISE 0 (> q1 q1)\n"
      "LINE 1 (> q1 q1) PREM 0");
  CHECK(proofs::check_proof(p).reason == "premise-not-allowed");
  CHECK(proofs::check_proof(p).where == proofs::Verdict::Where::Premise);
  CHECK(proofs::check_proof(p, {prop::parse_formula("(> q1 q1)")}).accepted);

  // A PREM line must restate its premise verbatim.
  const proofs::Proof lied = proofs::parse_proof(
      "PREMISE 0 (> q1 q1)\n"
      "LINE 1 (> q2 q2) PREM 0");
  CHECK(proofs::check_proof(lied, {prop::parse_formula("(> q1 q1)")}).reason ==
        "premise-mismatch");
}

TEST_CASE("substitution lines recompute the image formula") {
  const proofs::Proof p = proofs::parse_proof(
      "LINE 1 (> q1 (> q2 q1)) AX k\n"
      "LINE 2 (> (~ q3) (> q2 (~ q3))) SUB 1 {q1:=(~ q3)}");
  CHECK(proofs::check_proof(p).accepted);

  const proofs::Proof wrong = proofs::parse_proof(
      "LINE 1 (> q1 (> q2 q1)) AX k\n"
      "LINE 2 (> (~ q3) (> q2 q3)) SUB 1 {q1:=(~ q3)}");
  CHECK(proofs::check_proof(wrong).reason == "sub-mismatch");

  SUBCASE("strict mode only substitutes into premise or import lineage") {
    proofs::CheckOptions strict;
    strict.strict_substitution_targets = true;
    CHECK_FALSE(proofs::check_proof(p, {}, {}, strict).accepted);
    CHECK(proofs::check_proof(p, {}, {}, strict).reason == "strict-sub-target");

    const proofs::Proof viaprem = proofs::parse_proof(
        "PREMISE 0 (> q1 q1)\n"
        "LINE 1 (> q1 q1) PREM 0\n"
        "LINE 2 (> (& q1 q2) (& q1 q2)) SUB 1 {q1:=(& q1 q2)}");
    const std::vector<Formula> allowed = {prop::parse_formula("(> q1 q1)")};
    CHECK(proofs::check_proof(viaprem, allowed).accepted);
    CHECK(proofs::check_proof(viaprem, allowed, {}, strict).accepted);

    // One MP step away from the premise keeps the lineage.
    const proofs::Proof derived = proofs::parse_proof(
        "PREMISE 0 q1\n"
        "LINE 1 q1 PREM 0\n"
        "LINE 2 (> q1 (> q2 q1)) AX k\n"
        "LINE 3 (> q2 q1) MP 1 2\n"
        "LINE 4 (> q2 (~ q3)) SUB 3 {q1:=(~ q3)}");
    const std::vector<Formula> allow_q1 = {q(1)};
    CHECK(proofs::check_proof(derived, allow_q1).accepted);
    CHECK(proofs::check_proof(derived, allow_q1, {}, strict).accepted);
  }
}

TEST_CASE("substitute_proof extends a proof by one checked SUB line") {
  const proofs::Proof p = proofs::parse_proof(fixture_text());
  std::map<prop::Atom, prop::Formula> sigma{
      {prop::Atom::named(uint64_t{1}), prop::parse_formula("(& q2 q3)")}};
  const proofs::Proof sp = proofs::substitute_proof(p, sigma);
  CHECK(sp.lines.size() == p.lines.size() + 1);
  CHECK(sp.lines.back().rule.kind == proofs::Rule::Kind::Sub);
  CHECK(sp.conclusion() == prop::substitute(p.conclusion(), sigma));
  CHECK(sp.conclusion() == prop::parse_formula("(| (& q2 q3) (~ (& q2 q3)))"));
  CHECK(proofs::check_proof(sp).accepted);
  // The grown proof still renders and reparses.
  CHECK(proofs::check_proof(proofs::parse_proof(proofs::render_proof(sp))).accepted);
}

TEST_CASE("imports verify their base proofs before the derivation runs") {
  const Formula em = prop::parse_formula("(| q1 (~ q1))");
  proofs::FPlusProof fp;
  fp.imports.push_back({em, circuits::truth_table_base_proof(em)});
  proofs::Proof d;
  d.lines.push_back({1, em, {proofs::Rule::Kind::Import, "", 0, 0, {}, 0}});
  fp.derivation = d;
  CHECK(proofs::check_fplus(fp, circuits::truth_table_base()).accepted);

  SUBCASE("a base proof of a different formula is caught") {
    proofs::FPlusProof bad = fp;
    bad.imports[0].base_proof =
        circuits::truth_table_base_proof(prop::parse_formula("(> q1 q1)"));
    const proofs::Verdict v = proofs::check_fplus(bad, circuits::truth_table_base());
    CHECK_FALSE(v.accepted);
    CHECK(v.where == proofs::Verdict::Where::ImportEntry);
    CHECK(v.at == 0);
    CHECK(v.reason == "import-statement-mismatch");
  }
  SUBCASE("a rejected base proof is caught") {
    proofs::FPlusProof bad = fp;
    bad.imports[0].base_proof[0] ^= 1;  // corrupt the encoding header
    const proofs::Verdict v = proofs::check_fplus(bad, circuits::truth_table_base());
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == "import-verify");
  }
  SUBCASE("an IMPORT line must cite a declared entry verbatim") {
    proofs::FPlusProof bad = fp;
    bad.derivation.lines[0].formula = prop::parse_formula("(| q2 (~ q2))");
    const proofs::Verdict v = proofs::check_fplus(bad, circuits::truth_table_base());
    CHECK(v.reason == "import-mismatch");
  }
  SUBCASE("render and reparse keep the import payload") {
    const std::string text = proofs::render_fplus(fp);
    CHECK(proofs::looks_like_fplus(text));
    const proofs::FPlusProof back = proofs::parse_fplus(text);
    CHECK(back.imports.size() == 1);
    CHECK(back.imports[0].base_proof == fp.imports[0].base_proof);
    CHECK(proofs::check_fplus(back, circuits::truth_table_base()).accepted);
    CHECK(proofs::render_fplus(back) == text);
  }
}

TEST_CASE("looks_like_fplus reads the first significant line") {
  CHECK_FALSE(proofs::looks_like_fplus(fixture_text()));
  CHECK(proofs::looks_like_fplus("# note\nIMPORT 0 T BASEPROOF AAAA\nLINE 1 T IMPORT 0"));
  CHECK_FALSE(proofs::looks_like_fplus("PREMISE 0 q1\nLINE 1 q1 PREM 0"));
  CHECK_FALSE(proofs::looks_like_fplus(""));
}

TEST_CASE("base64 round trips and rejects malformed text") {
  std::mt19937 rng(611);
  for (size_t len = 0; len <= 10; ++len) {
    std::vector<uint8_t> bytes(len);
    for (uint8_t& b : bytes) b = static_cast<uint8_t>(rng());
    CHECK(proofs::base64_decode(proofs::base64_encode(bytes)) == bytes);
  }
  CHECK(proofs::base64_encode({'f', 'o', 'o'}) == "Zm9v");
  CHECK_THROWS_AS(proofs::base64_decode("ab!c"), ParseError);
  CHECK_THROWS_AS(proofs::base64_decode("a==="), ParseError);
  CHECK_THROWS_AS(proofs::parse_fplus("IMPORT 0 T BASEPROOF !!!!\nLINE 1 T IMPORT 0"),
                  ParseError);
}

TEST_CASE("proof sizes count formulas, substitutions, and import bytes") {
  proofs::Proof tiny;
  tiny.lines.push_back({1, prop::f_true(), {proofs::Rule::Kind::Axiom, "truth",
                                            0, 0, {}, 0}});
  CHECK(proofs::proof_size(tiny) == 1);

  const proofs::Proof k1 = proofs::parse_proof("LINE 1 (> q1 (> q2 q1)) AX k");
  CHECK(proofs::proof_size(k1) == 5);
  std::map<prop::Atom, prop::Formula> sigma{
      {prop::Atom::named(uint64_t{1}), prop::parse_formula("(& q2 q3)")}};
  const proofs::Proof k2 = proofs::substitute_proof(k1, sigma);
  // The SUB line adds its image formula (9 symbols) plus one map entry
  // (atom marker plus a 3-symbol image).
  CHECK(proofs::proof_size(k2) == 5 + 9 + 1 + 3);

  proofs::FPlusProof fp;
  fp.imports.push_back({prop::f_true(), {1, 2, 3, 4}});
  fp.derivation = tiny;
  CHECK(proofs::proof_size(fp) == proofs::proof_size(tiny) + 4);
}

TEST_CASE("generated proofs from the prover pass the strict checker") {
  // prove_closed handles any formula whose constant fold is true.
  const Formula closed = prop::parse_formula("(> q1 (| q1 T))");
  const proofs::Proof pc = prover::prove_closed(closed);
  CHECK(pc.premises.empty());
  CHECK(pc.conclusion() == closed);
  proofs::CheckOptions strict;
  strict.strict_substitution_targets = true;
  CHECK(proofs::check_proof(pc, {}, {}, strict).accepted);

  const Formula a = prop::parse_formula("(& q1 (| q2 F))");
  const auto [fwd, bwd] = prover::prove_equiv_chain(a, prop::fold_constants(a));
  CHECK(fwd.conclusion() == prop::parse_formula("(> (& q1 (| q2 F)) (& q1 q2))"));
  CHECK(bwd.conclusion() == prop::parse_formula("(> (& q1 q2) (& q1 (| q2 F)))"));
  CHECK(proofs::check_proof(fwd, {}, {}, strict).accepted);
  CHECK(proofs::check_proof(bwd, {}, {}, strict).accepted);

  prover::Derivation d;
  const Formula self = prop::parse_formula("(& (& T (~ F)) (> (& q1 q2) (& q1 q2)))");
  const uint64_t id = prover::prove_self_evident(d, self);
  d.conclude(id);
  const proofs::Proof sp = d.take();
  CHECK(sp.conclusion() == self);
  CHECK(proofs::check_proof(sp, {}, {}, strict).accepted);
}

TEST_CASE("checking large generated proofs is identical in parallel") {
  const Formula a = prop::parse_formula("(| (& q1 (& q2 (~ F))) (| (~ q3) T))");
  const proofs::Proof p = prover::prove_closed(a);
  proofs::CheckOptions par;
  par.parallel = true;
  CHECK(proofs::check_proof(p).accepted == proofs::check_proof(p, {}, {}, par).accepted);

  // Break one line; both modes must point at the same first failure.
  proofs::Proof broken = p;
  broken.lines[broken.lines.size() / 2].formula = prop::f_false();
  const proofs::Verdict vs = proofs::check_proof(broken);
  const proofs::Verdict vp = proofs::check_proof(broken, {}, {}, par);
  CHECK_FALSE(vs.accepted);
  CHECK(vs.accepted == vp.accepted);
  CHECK(vs.at == vp.at);
  CHECK(vs.reason == vp.reason);
}
