#pragma once

// Bit-level encoding of propositional formulas as strings, the fixed
// two-sorted formula Eval(X, Y, Z), and the schematic Frege proof of the
// substituted antecedent that the proof-compilation pipeline relies on.
//
// Encoding layout (little-endian within each field):
//   bits 0..15        node count n
//   bits 16+20i ..    node record i: 4-bit kind, 8-bit left, 8-bit right
//   bit  16+20n       sentinel (forced 1 so the length determines n)
// Node 0 is the root and children sit strictly after their parents, so a
// prefix scan can check well-foundedness locally.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reduct/prop.hpp"
#include "reduct/sigma.hpp"
#include "reduct/strings.hpp"
#include "reduct/translate.hpp"
#include "reduct/proofs.hpp"

namespace reduct::evalenc {

inline constexpr uint64_t kHeaderBits = 16;
inline constexpr uint64_t kKindBits = 4;
inline constexpr uint64_t kFieldBits = 8;
inline constexpr uint64_t kRecordBits = kKindBits + 2 * kFieldBits;
inline constexpr uint64_t kNodeCap = 255;

// Record kind codes.  Leaves zero both index fields; Atom stores the atom
// rank in the left field; Not stores its child in the left field.
enum class NodeKind : uint32_t {
  False = 0,
  True = 1,
  Atom = 2,
  Not = 3,
  And = 4,
  Or = 5,
  Imp = 6,
};

// Distinct subformulas of f, root first, every child strictly after its
// parent.  This is the node ordering used by the encoding and by traces.
std::vector<prop::Formula> encode_order(prop::Formula f);

// Encodes f in the layout above.  Atoms must be named q0..q(l-1) or
// q1..ql; the stored rank is position in that numeric order.  Throws
// StructureError past the node cap or on other atom labels.
StringValue encode_formula(prop::Formula f);

// Strict inverse of encode_formula: rejects (StructureError) anything that
// is not the canonical encoding of some formula — bad length or header,
// unknown kinds, child indices out of range, nonzero unused fields,
// duplicate records, unreachable nodes, or a gap in the atom ranks.
// atom_base names the decoded atoms: rank r becomes q(atom_base + r).
prop::Formula decode_formula(const StringValue& bits,
                             uint64_t atom_base = 0);

// Bit i = truth value of encode_order(f)[i] under a, plus the sentinel.
// Bit 0 is the value of f itself.
StringValue compute_eval_trace(prop::Formula f,
                                        const prop::Assignment& a);

// The fixed formula Eval(X, Y, Z): X assigns the atoms, Y encodes a
// formula, and Z lists one truth value per node consistent with X and the
// local node semantics.  For every formula F within the node cap, every
// total assignment a and every candidate Z of the right length,
// eval_formula(Eval, {X=bits(a), Y=encode(F), Z}) holds iff Z is the
// correct trace.  Child index fields are decoded with bounded quantifiers
// asserting bitwise equality, the only mechanism the term language offers.
sigma::FormulaPtr generate_eval();

// String lengths Eval is translated at for a formula with the given atom
// and node counts: X carries one bit per atom, Y the encoding, Z one bit
// per node, each plus a sentinel.
translate::LengthProfile eval_profile(uint64_t atom_count,
                                      uint64_t node_count);

// The packed X string for an assignment: bit j = value of the rank-j atom.
StringValue assignment_bits(const std::vector<prop::Atom>& order,
                                     const prop::Assignment& a);

// Substitution sending every non-sentinel bit atom pV.j of the named
// string variable to the constant bit j of value.
std::map<prop::Atom, prop::Formula> bit_substitution(
    const std::string& var, const StringValue& value);

// The second pipeline substitution: pX.j goes to the rank-j atom of f
// (q_{j+1} for q1-based formulas) and pZ.i to the node-i subformula, so
// pZ.0 goes to f itself.
std::map<prop::Atom, prop::Formula> xz_substitution(prop::Formula f);

// The antecedent left over after both pipeline substitutions: translate
// Eval at f's profile, fix Y to encode(f), fold, then apply
// xz_substitution.  Every conjunct is self-evident (T, ~F, or an
// implication between identical nodes) because the trace substitution is
// consistent by construction.
prop::Formula eval_prime_formula(prop::Formula f);

// Premise-free derivation of eval_prime_formula(f), linear in its size.
proofs::Proof prove_eval_prime(prop::Formula f);

}  // namespace reduct::evalenc
