#pragma once

// Proof construction on top of the checker's rule set.  Derivation appends
// lines with consecutive ids and offers the standard derived steps
// (identity, syllogism, weakening, and friends) as plain axiom/MP emissions,
// so everything it produces passes the strict substitution mode untouched.
//
// EquivEngine turns constant folding into proofs: for any formula F it
// derives F > fold(F) and fold(F) > F, proving or refuting subformulas that
// fold to a constant outright and rebuilding the rest by congruence.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reduct/proofs.hpp"
#include "reduct/prop.hpp"

namespace reduct::prover {

class Derivation {
 public:
  explicit Derivation(std::vector<prop::Formula> premises = {},
                      std::vector<prop::Formula> imports = {});

  // Primitive lines.  axiom() validates the instance against the schema and
  // mp() derives its conclusion from the cited lines; both throw
  // StructureError on misuse.
  uint64_t axiom(const std::string& schema, prop::Formula instance);
  uint64_t mp(uint64_t antecedent, uint64_t implication);
  uint64_t sub(uint64_t source, const std::map<prop::Atom, prop::Formula>& sigma);
  uint64_t premise(uint64_t k);
  uint64_t import_line(uint64_t k);

  // Inserts a comment before the next line.
  void mark(const std::string& text);

  prop::Formula formula(uint64_t id) const;
  uint64_t last_id() const { return next_id_ - 1; }
  size_t line_count() const { return proof_.lines.size(); }
  uint64_t current_size() const { return size_; }

  // Derived steps; each returns the id of the line proving the result.
  uint64_t identity(prop::Formula c);                        // C > C
  uint64_t weaken(uint64_t y, prop::Formula x);              // Y gives X > Y
  uint64_t syl(uint64_t ab, uint64_t bc);                    // A>B, B>C give A>C
  uint64_t prefix_imp(uint64_t bc, prop::Formula a);         // B>C gives (A>B)>(A>C)
  uint64_t suffix_imp(uint64_t a2a, prop::Formula b);        // A2>A gives (A>B)>(A2>B)
  uint64_t apply_under(uint64_t xyz, uint64_t y);            // X>(Y>Z), Y give X>Z
  uint64_t flip(uint64_t abc);                               // A>(B>C) gives B>(A>C)
  uint64_t combine_imp_and(uint64_t xy, uint64_t xz);        // X>Y, X>Z give X>(Y&Z)
  uint64_t from_false(prop::Formula b);                      // F > B
  uint64_t ex_falso_imp(uint64_t not_a, prop::Formula b);    // ~A gives A > B
  uint64_t dni(uint64_t a);                                  // A gives ~~A
  uint64_t not_cong(uint64_t a2a);                           // A2>A gives (~A)>(~A2)
  uint64_t truth_line();                                     // T
  uint64_t nonfalsity_line();                                // ~F

  // Re-derives `id`'s formula as the last line if something follows it.
  uint64_t conclude(uint64_t id);

  proofs::Proof take();

 private:
  uint64_t append(prop::Formula f, proofs::Rule rule);

  proofs::Proof proof_;
  std::vector<prop::Formula> imports_;
  std::vector<prop::Formula> by_id_;  // formula of line id i+1 at position i
  std::unordered_map<const prop::Node*, uint64_t> identity_memo_;
  uint64_t truth_ = 0;
  uint64_t nonfalsity_ = 0;
  uint64_t next_id_ = 1;
  uint64_t size_ = 0;
};

// Proof fragments for constant folding, attached to one Derivation.
class EquivEngine {
 public:
  explicit EquivEngine(Derivation& d) : d_(d) {}

  // Line proving `f` when its constant fold is T, or ~f when it is F.
  // Throws StructureError when `f` does not fold to a constant.
  uint64_t value_line(prop::Formula f);

  // Lines proving f > fold(f) (fwd) and fold(f) > f (bwd).  The two
  // directions are derived independently and memoised per node, so a
  // one-directional consumer only pays for the direction it cites; under an
  // implication's antecedent the requested direction flips.
  uint64_t equiv_fwd(prop::Formula f);
  uint64_t equiv_bwd(prop::Formula f);
  std::pair<uint64_t, uint64_t> equiv_lines(prop::Formula f);

 private:
  bool value_of(prop::Formula f);
  prop::Formula fold_of(prop::Formula f);
  uint64_t rewrite_fwd(prop::Op op, prop::Formula a, prop::Formula b);
  uint64_t rewrite_bwd(prop::Op op, prop::Formula a, prop::Formula b);

  Derivation& d_;
  std::unordered_map<const prop::Node*, prop::Formula> folds_;
  std::unordered_map<const prop::Node*, uint64_t> value_lines_;
  std::unordered_map<const prop::Node*, uint64_t> fwd_;
  std::unordered_map<const prop::Node*, uint64_t> bwd_;
};

// Standalone proof of a formula whose constant fold is true.
proofs::Proof prove_closed(prop::Formula f);

// Proofs of A > B and B > A where B is the constant fold of A (or A itself).
std::pair<proofs::Proof, proofs::Proof> prove_equiv_chain(prop::Formula a,
                                                          prop::Formula b);

// Proves formulas assembled from T, ~F, C > C, and conjunctions of such.
// Emits into `d` and returns the proving line.
uint64_t prove_self_evident(Derivation& d, prop::Formula f);

}  // namespace reduct::prover
