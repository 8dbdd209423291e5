#pragma once

// Frege proofs: axiom-schema instances, modus ponens, substitution, premises,
// and imports, with a line-by-line checker.  An extended proof carries a
// table of imported tautologies, each backed by a proof in a base system
// that is verified before the derivation itself.
//
// Text format (one line each, '#' starts a comment line):
//   PREMISE <k> <formula>
//   IMPORT <k> <formula> BASEPROOF <base64>
//   LINE <id> <formula> AX <schema>
//   LINE <id> <formula> MP <i> <j>
//   LINE <id> <formula> SUB <i> {atom:=formula;...}
//   LINE <id> <formula> PREM <k>
//   LINE <id> <formula> IMPORT <k>
// Line ids must be strictly increasing; MP cites <i> proving A and <j>
// proving A > B to conclude B.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reduct/prop.hpp"

namespace reduct::proofs {

// The thirteen axiom schemas, keyed by name.  Patterns are over the named
// atoms p, q, r; an instance is any substitution image of the pattern.
const std::vector<std::pair<std::string, prop::Formula>>& axiom_schemas();

// The schema pattern for `name`, or an empty handle if unknown.
prop::Formula schema_pattern(const std::string& name);

// True when `f` is a substitution instance of the named schema.
bool is_schema_instance(const std::string& name, prop::Formula f);

struct Rule {
  enum class Kind : uint8_t { Axiom, Mp, Sub, Premise, Import };
  Kind kind = Kind::Axiom;
  std::string schema;                         // Axiom
  uint64_t i = 0;                             // Mp antecedent / Sub source
  uint64_t j = 0;                             // Mp implication
  std::map<prop::Atom, prop::Formula> sigma;  // Sub
  uint64_t k = 0;                             // Premise / Import index
};

struct ProofLine {
  uint64_t id = 0;
  prop::Formula formula;
  Rule rule;
};

struct Proof {
  std::vector<prop::Formula> premises;        // declared, indexed by PREM k
  std::vector<ProofLine> lines;
  // Comment text inserted before the line at the given index when rendering.
  std::vector<std::pair<size_t, std::string>> comments;

  prop::Formula conclusion() const;  // formula of the last line
};

struct Import {
  prop::Formula tautology;
  std::vector<uint8_t> base_proof;
};

struct FPlusProof {
  std::vector<Import> imports;
  Proof derivation;
};

// A base proof system: verify returns the proved formula, or an empty handle
// when the bytes are not an accepted base proof.
struct BaseSystemHandle {
  std::string name;
  std::function<prop::Formula(const std::vector<uint8_t>&)> verify;
};

struct CheckOptions {
  // Restricts SUB to lines that rest on an import or premise: the cited line
  // must be an IMPORT/PREM line or cite one through its own rule references.
  bool strict_substitution_targets = false;
  bool parallel = false;
};

struct Verdict {
  bool accepted = false;
  enum class Where : uint8_t { None, Line, Premise, ImportEntry } where = Where::None;
  uint64_t at = 0;     // line id, premise index, or import index
  std::string reason;  // short reason code, empty when accepted

  static Verdict ok() { return Verdict{true, Where::None, 0, ""}; }
};

// Checks every line's rule against the lines before it.  Declared premises
// must appear in `allowed_premises`; IMPORT lines must match
// `import_formulas` (the already-verified import table).
Verdict check_proof(const Proof& p,
                    const std::vector<prop::Formula>& allowed_premises = {},
                    const std::vector<prop::Formula>& import_formulas = {},
                    const CheckOptions& opts = {});

// Verifies each import's base proof, then checks the derivation with the
// import table available.
Verdict check_fplus(const FPlusProof& p, const BaseSystemHandle& base,
                    const std::vector<prop::Formula>& allowed_premises = {},
                    const CheckOptions& opts = {});

// Total symbol count: line formulas, substitution maps (atom plus image per
// entry), and import payload bytes.
uint64_t proof_size(const Proof& p);
uint64_t proof_size(const FPlusProof& p);

// Extends an accepted premise-free proof with one SUB line, yielding a proof
// of substitute(conclusion, sigma).
Proof substitute_proof(const Proof& p,
                       const std::map<prop::Atom, prop::Formula>& sigma);

std::string render_proof(const Proof& p);
std::string render_fplus(const FPlusProof& p);
Proof parse_proof(std::string_view text);
FPlusProof parse_fplus(std::string_view text);

// True when the first significant line of the text is an IMPORT header.
bool looks_like_fplus(std::string_view text);

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(std::string_view text);  // ParseError on bad input

}  // namespace reduct::proofs
