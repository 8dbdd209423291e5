#pragma once

// Propositional translation of two-sorted formulas at fixed string lengths.
//
// A string variable X of length n contributes atoms pX.0 .. pX.(n-2); the
// top bit X(n-1) is forced true by the length and out-of-range bits are
// false.  Bounded quantifiers expand into balanced conjunctions or
// disjunctions over 0..bound.  With folding on (the default) the output
// carries constants only at the root, matching fold_constants of the
// unfolded translation.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "reduct/prop.hpp"
#include "reduct/sigma.hpp"
#include "reduct/strings.hpp"

namespace reduct::translate {

// Fixed lengths for string variables plus values for free number variables.
// Text form: "X=3,Y=5;x=2" (string lengths, then number values after the
// semicolon; either part may be empty).
struct LengthProfile {
  std::map<std::string, uint64_t> lengths;
  std::map<std::string, uint64_t> numvals;

  static LengthProfile parse(std::string_view text);
  std::string text() const;

  bool operator==(const LengthProfile& o) const {
    return lengths == o.lengths && numvals == o.numvals;
  }
};

// Translates `f` at the given profile.  Every free variable of `f` must be
// covered by the profile (StructureError otherwise).
prop::Formula translate(const sigma::FormulaPtr& f, const LengthProfile& prof,
                        bool fold = true);

// The propositional assignment describing concrete strings at the profile's
// lengths: pX.j is bit j of the value of X.  Every value must have exactly
// the profile length (StructureError otherwise).
prop::Assignment assignment_of_strings(
    const LengthProfile& prof,
    const std::map<std::string, StringValue>& values);

// Number of free bits when enumerating all strings at the profile lengths
// (a length-n string has n-1 free bits; the top bit is forced).
uint64_t string_space_bits(const LengthProfile& prof);

// Exhaustive semantic check: true iff `f` holds for every tuple of strings
// with exactly the profile lengths (numbers fixed by the profile).  When
// `witness` is non-null and the result is false, stores the lexicographically
// first falsifying tuple.  Serial and parallel kernels agree exactly.
bool holds_for_all_strings(const sigma::FormulaPtr& f,
                           const LengthProfile& prof,
                           std::map<std::string, StringValue>* witness = nullptr,
                           bool parallel = false);

}  // namespace reduct::translate
