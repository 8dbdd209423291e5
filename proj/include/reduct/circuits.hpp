#pragma once

// Boolean circuits standing in for the polytime verifier of a proof system
// g, the consistency formula phi_g(U, Y, W) asserting that the wire trace W
// witnesses g(U) = Y, and the soundness statement built from it.  Two
// concrete systems ship: a truth-table system (proofs are a formula plus
// its full table) and systems manufactured from a true two-sorted formula
// (proofs are unary-coded lengths).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "reduct/proofs.hpp"
#include "reduct/prop.hpp"
#include "reduct/sigma.hpp"
#include "reduct/strings.hpp"
#include "reduct/translate.hpp"

namespace reduct::circuits {

enum class GateOp : uint8_t { Input, Const0, Const1, And, Or, Not };

struct Gate {
  GateOp op;
  uint64_t a = 0;  // first input id (Not/And/Or)
  uint64_t b = 0;  // second input id (And/Or)
};

// Gate ids are positions; every referenced input has a smaller id, so the
// sequence is one topological pass.  accept is the verdict wire and ybits
// name the wires carrying the non-sentinel output bits, low index first.
struct Circuit {
  std::vector<Gate> gates;
  uint64_t accept = 0;
  std::vector<uint64_t> ybits;
};

// Structural check: input references point backwards, accept and ybits
// name existing gates.  Throws StructureError.
void validate_circuit(const Circuit& c);

uint64_t input_count(const Circuit& c);

// Evaluates the circuit on one bit per INPUT gate (in gate order) and
// returns the full wire trace plus a sentinel bit.
StringValue run_circuit(const Circuit& c, const std::vector<bool>& inputs);

// Text form: one `<id> <OP> [inputs...]` line per gate in id order, then
// `ACCEPT <id>` and `YBITS <id>...` trailers.
std::string render_circuit(const Circuit& c);
Circuit parse_circuit(std::string_view text);

// A proof system as a polytime map: compute sends proof strings to proved
// formulas (total; garbage maps to T), and circuit_family returns, for
// given |U| and |Y|, a circuit over the non-sentinel U bits whose accept
// wire is 1 exactly when encode_formula(compute(U)) has length |Y|, with
// the ybits wires then carrying that encoding.
struct ProofSystemSpec {
  std::string name;
  std::function<prop::Formula(const StringValue&)> compute;
  std::function<Circuit(uint64_t, uint64_t)> circuit_family;
};

// The formula phi_g(U, Y, W) for the circuit at the given lengths: every
// wire bit of W agrees with its gate, the accept wire is set, and the
// ybits wires agree with Y.  Quantifier free; true exactly when W is the
// run_circuit trace on U's bits and compute(U) = Y.
sigma::FormulaPtr gen_phi_g(const ProofSystemSpec& spec, uint64_t len_u,
                            uint64_t len_y);

// String lengths for one soundness instance.
struct SoundProfile {
  uint64_t len_u = 0;
  uint64_t len_y = 0;
  uint64_t len_x = 0;
  uint64_t len_z = 0;
  uint64_t len_w = 0;

  translate::LengthProfile profile() const;
};

// Eval(X,Y,Z) and phi_g(U,Y,W) imply Z(0): if W certifies that Y is the
// output of the proof system on U and Z evaluates Y under X, the root
// value is true.  Validates the profile: len_y on the record grid, len_z
// the implied node count plus sentinel, len_w one bit per gate plus
// sentinel.
sigma::FormulaPtr build_sound_g(const ProofSystemSpec& spec,
                                const SoundProfile& p);

// g whose proofs are an encoded formula followed by its full truth table:
// compute returns the formula when every table bit is 1 and matches the
// row evaluation (atom rank j reads bit j of the row index), T otherwise.
ProofSystemSpec truth_table_system();

// The honest proof of a tautology in that system.  Throws CapExceeded when
// the table would exceed the atom cap.
StringValue truth_table_proof(prop::Formula f);

// g manufactured from a two-sorted formula that is true at all lengths:
// proofs are unary-coded lengths (n_i ones, separated by zeros, one block
// per free string variable in name order) and compute returns the
// propositional translation at those lengths, atoms relabelled q1..qm.
// phi must have at least one free string variable and no free number
// variables.
ProofSystemSpec make_formula_system(const sigma::FormulaPtr& phi);

// The proof string selecting the given lengths (same variable order).
StringValue formula_system_input(const std::vector<uint64_t>& lengths);

// Oracle sweep behind make_formula_system's truth obligation: every length
// tuple with all n_i <= max_each whose translation is not a tautology.
// Empty result = no counterexample at desk scale.
std::vector<std::vector<uint64_t>> non_tautology_profiles(
    const sigma::FormulaPtr& phi, uint64_t max_each);

// The base system f for imports: proof bytes are a formula in the prefix
// grammar, a newline, then one '0'/'1' per row of its full truth table.
// Accepted only if every row is correct and true.
proofs::BaseSystemHandle truth_table_base();

std::vector<uint8_t> truth_table_base_proof(prop::Formula f);

}  // namespace reduct::circuits
