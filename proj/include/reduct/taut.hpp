#pragma once

// Brute-force tautology oracle over propositional formulas.
//
// The oracle enumerates all assignments of the formula's atoms, so it is
// capped at a small atom count (default 20, overridable through the
// REDUCT_ATOM_CAP environment variable).  Assignments are indexed by an
// integer whose bit j gives the value of the j-th atom in sorted order;
// counterexample searches always report the smallest such index, so the
// serial and parallel kernels return identical results.

#include <cstdint>
#include <optional>
#include <vector>

#include "reduct/prop.hpp"

namespace reduct::taut {

// Current atom cap: REDUCT_ATOM_CAP when set to a positive integer, else 20.
uint64_t atom_cap();

// A formula compiled to a flat postorder program for fast repeated
// evaluation.  One instruction per distinct DAG node; atoms are resolved to
// their rank in the sorted atom list once, at compile time.
class CompiledEval {
 public:
  explicit CompiledEval(prop::Formula f);

  const std::vector<prop::Atom>& atom_order() const { return atoms_; }
  size_t num_atoms() const { return atoms_.size(); }

  // Evaluates under the assignment whose bit j (of `bits`) gives the value
  // of atom_order()[j].
  bool run(uint64_t bits) const;

 private:
  struct Ins {
    prop::Op op;
    uint32_t a = 0;  // operand slot, or atom rank for Op::Atom
    uint32_t b = 0;
  };
  std::vector<Ins> program_;
  std::vector<prop::Atom> atoms_;
};

// Builds the assignment mapping atoms[j] to bit j of `bits`.
prop::Assignment assignment_from_bits(const std::vector<prop::Atom>& atoms,
                                      uint64_t bits);

// Smallest falsifying assignment index, or nullopt when every assignment
// satisfies the program.  The parallel kernel scans chunks of the assignment
// space with OpenMP and keeps a shared minimum so its answer matches the
// serial scan exactly.
std::optional<uint64_t> find_counterexample_serial(const CompiledEval& ce);
std::optional<uint64_t> find_counterexample_parallel(const CompiledEval& ce);

// True iff `f` evaluates true under every assignment of its atoms.  Throws
// CapExceeded when the formula has more atoms than the oracle cap.  When
// `counterexample` is non-null and the result is false, stores the smallest
// falsifying assignment index.
bool is_tautology_bruteforce(prop::Formula f,
                             std::optional<uint64_t>* counterexample = nullptr,
                             bool parallel = false);

}  // namespace reduct::taut
