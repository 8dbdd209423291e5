#pragma once

// The soundness-to-proof pipeline: compile a g-proof U_0 of a tautology A
// into a checkable Frege proof of A itself.  The soundness statement of g
// is translated at the lengths read off U_0 and A, specialised to the bits
// of U_0, encode_formula(A), and the wire trace, its closed verifier half
// is folded to T by an explicit subproof, and the surviving evaluation
// antecedent is discharged in self-evident form.
//
// Two modes: Premise declares the soundness translation as a premise and
// substitutes into it; OracleImport skips the declared premise and imports
// the substituted instance as a tautology backed by a base-system proof,
// which keeps the whole output premise-free but only works while that
// instance fits under the brute-force atom cap.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reduct/circuits.hpp"
#include "reduct/proofs.hpp"
#include "reduct/prop.hpp"
#include "reduct/sigma.hpp"
#include "reduct/strings.hpp"

namespace reduct::simulate {

enum class Mode { Premise, OracleImport };

// One pipeline stage in the size ledger.
struct StageRecord {
  std::string stage;
  uint64_t lines_added = 0;
  uint64_t symbols_added = 0;
  uint64_t cumulative_size = 0;
};

struct SimulationRun {
  std::string system;
  StringValue input;             // U_0
  prop::Formula conclusion;      // A = compute(U_0)
  StringValue wire_trace;        // W_0
  Mode mode = Mode::Premise;
  circuits::SoundProfile profile;
  // Premise mode: imports empty, derivation declares the soundness
  // translation as its only premise.  OracleImport mode: premise-free with
  // one import.
  proofs::FPlusProof output;
  std::vector<StageRecord> stages;
};

// Runs the six-stage pipeline and re-checks the result before returning.
// Throws StructureError (tagged with the failing stage) on any internal
// mismatch and CapExceeded when OracleImport needs more atoms than the
// oracle allows.
SimulationRun simulate(const circuits::ProofSystemSpec& spec,
                       const StringValue& u0, Mode mode);

// JSON-lines ledger: one record per stage, then a final record carrying
// the verdict and the conclusion text.
std::string render_simrun(const SimulationRun& run);

struct BenchRow {
  uint64_t input_bits = 0;
  uint64_t proof_symbols = 0;
  uint64_t proof_lines = 0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  // Least-squares fit of log(proof_symbols) against log(input_bits);
  // fitted only when at least two distinct input sizes are present.
  bool fitted = false;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> residuals;
};

BenchResult bench_polynomiality(const circuits::ProofSystemSpec& spec,
                                const std::vector<StringValue>& inputs,
                                Mode mode);

// The deterministic columns of the table (timings go to logs, not files,
// so repeated runs stay byte-identical).
std::string bench_csv(const BenchResult& r);

// (q1 v ~q1) ^ ... ^ (qk v ~qk), combined left to right.
prop::Formula excluded_middle_chain(uint64_t k);

struct WitnessIssue {
  std::vector<uint64_t> lengths;
  std::string reason;
};

struct WitnessReport {
  bool accepted = false;
  bool vacuous = false;  // empty proof map
  std::vector<WitnessIssue> issues;
  // Proof symbol counts per length tuple, in map order.
  std::vector<std::pair<std::vector<uint64_t>, uint64_t>> sizes;
};

// Checks each supplied proof against the system built from phi: the proof
// must verify (extended proofs against `base`, plain proofs premise-free)
// and conclude exactly the translation of phi at those lengths with its
// atoms relabelled q1..qm.  An empty map is vacuously accepted and flagged.
WitnessReport verify_membership_witness(
    const sigma::FormulaPtr& phi,
    const std::map<std::vector<uint64_t>, std::vector<uint8_t>>& witnesses,
    const proofs::BaseSystemHandle& base);

}  // namespace reduct::simulate
