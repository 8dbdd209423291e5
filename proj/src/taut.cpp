#include "reduct/taut.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "reduct/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reduct::taut {

uint64_t atom_cap() {
  const char* raw = std::getenv("REDUCT_ATOM_CAP");
  if (raw == nullptr || *raw == '\0') return 20;
  char* end = nullptr;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == nullptr || *end != '\0' || v == 0 || v > 62) return 20;
  return v;
}

CompiledEval::CompiledEval(prop::Formula f) : atoms_(prop::atoms(f)) {
  std::unordered_map<prop::Atom, uint32_t, prop::AtomHash> rank;
  for (uint32_t i = 0; i < atoms_.size(); ++i) rank.emplace(atoms_[i], i);

  // Emit one instruction per DAG node, children first, so every operand slot
  // refers to an earlier instruction.
  std::unordered_map<const prop::Node*, uint32_t> slot;
  std::vector<std::pair<prop::Formula, bool>> stack;  // (node, expanded)
  stack.emplace_back(f, false);
  while (!stack.empty()) {
    auto [g, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(g.node()) != 0) continue;
    if (!expanded) {
      stack.emplace_back(g, true);
      if (g.left()) stack.emplace_back(g.left(), false);
      if (g.right()) stack.emplace_back(g.right(), false);
      continue;
    }
    Ins ins;
    ins.op = g.op();
    switch (g.op()) {
      case prop::Op::False:
      case prop::Op::True:
        break;
      case prop::Op::Atom:
        ins.a = rank.at(g.atom());
        break;
      case prop::Op::Not:
        ins.a = slot.at(g.left().node());
        break;
      case prop::Op::And:
      case prop::Op::Or:
      case prop::Op::Imp:
        ins.a = slot.at(g.left().node());
        ins.b = slot.at(g.right().node());
        break;
    }
    slot.emplace(g.node(), static_cast<uint32_t>(program_.size()));
    program_.push_back(ins);
  }
}

bool CompiledEval::run(uint64_t bits) const {
  // Scratch buffer per call; the program is short enough that a heap vector
  // would dominate, so use a small stack buffer when possible.
  static thread_local std::vector<unsigned char> vals;
  vals.resize(program_.size());
  for (size_t i = 0; i < program_.size(); ++i) {
    const Ins& ins = program_[i];
    switch (ins.op) {
      case prop::Op::False: vals[i] = 0; break;
      case prop::Op::True: vals[i] = 1; break;
      case prop::Op::Atom: vals[i] = (bits >> ins.a) & 1u; break;
      case prop::Op::Not: vals[i] = !vals[ins.a]; break;
      case prop::Op::And: vals[i] = vals[ins.a] && vals[ins.b]; break;
      case prop::Op::Or: vals[i] = vals[ins.a] || vals[ins.b]; break;
      case prop::Op::Imp: vals[i] = !vals[ins.a] || vals[ins.b]; break;
    }
  }
  return vals.back() != 0;
}

prop::Assignment assignment_from_bits(const std::vector<prop::Atom>& atoms,
                                      uint64_t bits) {
  prop::Assignment a;
  for (size_t j = 0; j < atoms.size(); ++j) a[atoms[j]] = (bits >> j) & 1u;
  return a;
}

std::optional<uint64_t> find_counterexample_serial(const CompiledEval& ce) {
  const uint64_t total = uint64_t{1} << ce.num_atoms();
  for (uint64_t i = 0; i < total; ++i) {
    if (!ce.run(i)) return i;
  }
  return std::nullopt;
}

std::optional<uint64_t> find_counterexample_parallel(const CompiledEval& ce) {
  const uint64_t total = uint64_t{1} << ce.num_atoms();
  constexpr uint64_t kChunk = 4096;
  const uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::atomic<uint64_t> best{UINT64_MAX};

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int64_t c = 0; c < static_cast<int64_t>(chunks); ++c) {
    const uint64_t start = static_cast<uint64_t>(c) * kChunk;
    if (start >= best.load(std::memory_order_relaxed)) continue;
    const uint64_t stop = std::min(start + kChunk, total);
    for (uint64_t i = start; i < stop; ++i) {
      if (i >= best.load(std::memory_order_relaxed)) break;
      if (!ce.run(i)) {
        // Keep the global minimum: chunks whose start exceeds it are skipped,
        // and any smaller index still gets scanned before its chunk is done.
        uint64_t cur = best.load(std::memory_order_relaxed);
        while (i < cur &&
               !best.compare_exchange_weak(cur, i, std::memory_order_relaxed)) {
        }
        break;
      }
    }
  }
  const uint64_t found = best.load();
  if (found == UINT64_MAX) return std::nullopt;
  return found;
}

bool is_tautology_bruteforce(prop::Formula f,
                             std::optional<uint64_t>* counterexample,
                             bool parallel) {
  if (!f) throw StructureError("tautology oracle needs a formula");
  CompiledEval ce(f);
  if (ce.num_atoms() > atom_cap()) {
    throw CapExceeded("formula has " + std::to_string(ce.num_atoms()) +
                      " atoms, oracle cap is " + std::to_string(atom_cap()));
  }
  std::optional<uint64_t> found =
      parallel ? find_counterexample_parallel(ce) : find_counterexample_serial(ce);
  if (counterexample != nullptr) *counterexample = found;
  return !found.has_value();
}

}  // namespace reduct::taut
