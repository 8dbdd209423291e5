#include "reduct/proofs.hpp"

#include <algorithm>
#include <unordered_map>

#include "reduct/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reduct::proofs {

namespace {

prop::Formula P() { return prop::f_atom(prop::Atom::named(std::string("p"))); }
prop::Formula Q() { return prop::f_atom(prop::Atom::named(std::string("q"))); }
prop::Formula R() { return prop::f_atom(prop::Atom::named(std::string("r"))); }

std::vector<std::pair<std::string, prop::Formula>> build_schemas() {
  using prop::f_and;
  using prop::f_imp;
  using prop::f_not;
  using prop::f_or;
  prop::Formula p = P(), q = Q(), r = R();
  return {
      {"k", f_imp(p, f_imp(q, p))},
      {"s", f_imp(f_imp(p, f_imp(q, r)), f_imp(f_imp(p, q), f_imp(p, r)))},
      {"and-i", f_imp(p, f_imp(q, f_and(p, q)))},
      {"and-e1", f_imp(f_and(p, q), p)},
      {"and-e2", f_imp(f_and(p, q), q)},
      {"or-i1", f_imp(p, f_or(p, q))},
      {"or-i2", f_imp(q, f_or(p, q))},
      {"or-e", f_imp(f_imp(p, r), f_imp(f_imp(q, r), f_imp(f_or(p, q), r)))},
      {"neg-i", f_imp(f_imp(p, q), f_imp(f_imp(p, f_not(q)), f_not(p)))},
      {"dneg-e", f_imp(f_not(f_not(p)), p)},
      {"efq", f_imp(p, f_imp(f_not(p), q))},
      {"truth", prop::f_true()},
      {"nonfalsity", f_not(prop::f_false())},
  };
}

bool match_pattern(const prop::Node* pat, prop::Formula f,
                   std::map<prop::Atom, prop::Formula>& binding) {
  switch (pat->op) {
    case prop::Op::False:
    case prop::Op::True:
      return f.op() == pat->op;
    case prop::Op::Atom: {
      auto it = binding.find(pat->atom);
      if (it != binding.end()) return it->second == f;
      binding.emplace(pat->atom, f);
      return true;
    }
    case prop::Op::Not:
      return f.op() == prop::Op::Not && match_pattern(pat->a, f.left(), binding);
    default:
      return f.op() == pat->op && match_pattern(pat->a, f.left(), binding) &&
             match_pattern(pat->b, f.right(), binding);
  }
}

uint64_t sat_add(uint64_t a, uint64_t b) {
  uint64_t r = 0;
  return __builtin_add_overflow(a, b, &r) ? UINT64_MAX : r;
}

uint64_t sigma_size(const std::map<prop::Atom, prop::Formula>& sigma) {
  uint64_t s = 0;
  for (const auto& [atom, img] : sigma) {
    (void)atom;
    s = sat_add(s, sat_add(1, img ? img.symbol_size() : 0));
  }
  return s;
}

}  // namespace

const std::vector<std::pair<std::string, prop::Formula>>& axiom_schemas() {
  static const std::vector<std::pair<std::string, prop::Formula>> schemas =
      build_schemas();
  return schemas;
}

prop::Formula schema_pattern(const std::string& name) {
  for (const auto& [n, f] : axiom_schemas()) {
    if (n == name) return f;
  }
  return prop::Formula();
}

bool is_schema_instance(const std::string& name, prop::Formula f) {
  prop::Formula pat = schema_pattern(name);
  if (!pat || !f) return false;
  std::map<prop::Atom, prop::Formula> binding;
  return match_pattern(pat.node(), f, binding);
}

prop::Formula Proof::conclusion() const {
  if (lines.empty()) throw StructureError("proof has no lines");
  return lines.back().formula;
}

namespace {

struct CheckContext {
  const Proof& p;
  const std::vector<prop::Formula>& allowed_premises;
  const std::vector<prop::Formula>& import_formulas;
  const CheckOptions& opts;
  std::unordered_map<uint64_t, size_t> index_of;  // line id -> position
  std::vector<char> import_rooted;                // strict-mode taint

  // Empty string means the line checks out.
  std::string check_line(size_t at) const {
    const ProofLine& ln = p.lines[at];
    if (!ln.formula) return "missing-formula";
    switch (ln.rule.kind) {
      case Rule::Kind::Axiom: {
        prop::Formula pat = schema_pattern(ln.rule.schema);
        if (!pat) return "unknown-schema";
        std::map<prop::Atom, prop::Formula> binding;
        if (!match_pattern(pat.node(), ln.formula, binding)) return "axiom-mismatch";
        return "";
      }
      case Rule::Kind::Mp: {
        const ProofLine* ante = find_earlier(ln.rule.i, at);
        const ProofLine* imp = find_earlier(ln.rule.j, at);
        if (ante == nullptr || imp == nullptr) return "bad-ref";
        if (imp->formula.op() != prop::Op::Imp ||
            imp->formula.left() != ante->formula ||
            imp->formula.right() != ln.formula)
          return "mp-shape";
        return "";
      }
      case Rule::Kind::Sub: {
        const ProofLine* src = find_earlier(ln.rule.i, at);
        if (src == nullptr) return "bad-ref";
        for (const auto& [atom, img] : ln.rule.sigma) {
          (void)atom;
          if (!img) return "sub-mismatch";
        }
        if (opts.strict_substitution_targets &&
            import_rooted[index_of.at(ln.rule.i)] == 0)
          return "strict-sub-target";
        if (prop::substitute(src->formula, ln.rule.sigma) != ln.formula)
          return "sub-mismatch";
        return "";
      }
      case Rule::Kind::Premise: {
        if (ln.rule.k >= p.premises.size()) return "premise-range";
        if (p.premises[ln.rule.k] != ln.formula) return "premise-mismatch";
        return "";
      }
      case Rule::Kind::Import: {
        if (ln.rule.k >= import_formulas.size()) return "import-range";
        if (import_formulas[ln.rule.k] != ln.formula) return "import-mismatch";
        return "";
      }
    }
    return "bad-rule";
  }

  const ProofLine* find_earlier(uint64_t id, size_t at) const {
    auto it = index_of.find(id);
    if (it == index_of.end() || it->second >= at) return nullptr;
    return &p.lines[it->second];
  }
};

}  // namespace

Verdict check_proof(const Proof& p,
                    const std::vector<prop::Formula>& allowed_premises,
                    const std::vector<prop::Formula>& import_formulas,
                    const CheckOptions& opts) {
  if (p.lines.empty()) return Verdict{false, Verdict::Where::None, 0, "empty"};

  for (size_t k = 0; k < p.premises.size(); ++k) {
    if (!p.premises[k] ||
        std::find(allowed_premises.begin(), allowed_premises.end(),
                  p.premises[k]) == allowed_premises.end()) {
      return Verdict{false, Verdict::Where::Premise, k, "premise-not-allowed"};
    }
  }

  CheckContext ctx{p, allowed_premises, import_formulas, opts, {}, {}};
  ctx.index_of.reserve(p.lines.size() * 2);
  uint64_t prev_id = 0;
  bool have_prev = false;
  for (size_t i = 0; i < p.lines.size(); ++i) {
    uint64_t id = p.lines[i].id;
    if (have_prev && id <= prev_id)
      return Verdict{false, Verdict::Where::Line, id, "id-order"};
    prev_id = id;
    have_prev = true;
    ctx.index_of.emplace(id, i);
  }

  // Strict-mode taint: which lines rest on an import or premise.  Cheap to
  // compute up front and keeps the per-line checks independent.
  ctx.import_rooted.assign(p.lines.size(), 0);
  for (size_t i = 0; i < p.lines.size(); ++i) {
    const Rule& r = p.lines[i].rule;
    switch (r.kind) {
      case Rule::Kind::Premise:
      case Rule::Kind::Import:
        ctx.import_rooted[i] = 1;
        break;
      case Rule::Kind::Mp: {
        auto a = ctx.index_of.find(r.i);
        auto b = ctx.index_of.find(r.j);
        ctx.import_rooted[i] =
            (a != ctx.index_of.end() && a->second < i && ctx.import_rooted[a->second]) ||
            (b != ctx.index_of.end() && b->second < i && ctx.import_rooted[b->second]);
        break;
      }
      case Rule::Kind::Sub: {
        auto a = ctx.index_of.find(r.i);
        ctx.import_rooted[i] =
            a != ctx.index_of.end() && a->second < i && ctx.import_rooted[a->second];
        break;
      }
      case Rule::Kind::Axiom:
        break;
    }
  }

  size_t bad_index = p.lines.size();
  std::string bad_reason;

  if (opts.parallel) {
    std::vector<std::string> reasons(p.lines.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (int64_t i = 0; i < static_cast<int64_t>(p.lines.size()); ++i) {
      reasons[i] = ctx.check_line(static_cast<size_t>(i));
    }
    for (size_t i = 0; i < reasons.size(); ++i) {
      if (!reasons[i].empty()) {
        bad_index = i;
        bad_reason = reasons[i];
        break;
      }
    }
  } else {
    for (size_t i = 0; i < p.lines.size(); ++i) {
      std::string r = ctx.check_line(i);
      if (!r.empty()) {
        bad_index = i;
        bad_reason = r;
        break;
      }
    }
  }

  if (bad_index < p.lines.size())
    return Verdict{false, Verdict::Where::Line, p.lines[bad_index].id, bad_reason};
  return Verdict::ok();
}

Verdict check_fplus(const FPlusProof& p, const BaseSystemHandle& base,
                    const std::vector<prop::Formula>& allowed_premises,
                    const CheckOptions& opts) {
  for (size_t k = 0; k < p.imports.size(); ++k) {
    const Import& imp = p.imports[k];
    if (!imp.tautology)
      return Verdict{false, Verdict::Where::ImportEntry, k, "import-missing"};
    prop::Formula proved;
    try {
      proved = base.verify(imp.base_proof);
    } catch (const std::exception&) {
      proved = prop::Formula();
    }
    if (!proved)
      return Verdict{false, Verdict::Where::ImportEntry, k, "import-verify"};
    if (proved != imp.tautology)
      return Verdict{false, Verdict::Where::ImportEntry, k, "import-statement-mismatch"};
  }
  std::vector<prop::Formula> table;
  table.reserve(p.imports.size());
  for (const Import& imp : p.imports) table.push_back(imp.tautology);
  return check_proof(p.derivation, allowed_premises, table, opts);
}

uint64_t proof_size(const Proof& p) {
  uint64_t s = 0;
  for (const ProofLine& ln : p.lines) {
    s = sat_add(s, ln.formula ? ln.formula.symbol_size() : 0);
    if (ln.rule.kind == Rule::Kind::Sub) s = sat_add(s, sigma_size(ln.rule.sigma));
  }
  return s;
}

uint64_t proof_size(const FPlusProof& p) {
  uint64_t s = proof_size(p.derivation);
  for (const Import& imp : p.imports) s = sat_add(s, imp.base_proof.size());
  return s;
}

Proof substitute_proof(const Proof& p,
                       const std::map<prop::Atom, prop::Formula>& sigma) {
  if (p.lines.empty()) throw StructureError("cannot extend an empty proof");
  if (!p.premises.empty())
    throw StructureError("substitution closure needs a premise-free proof");
  Proof out = p;
  const ProofLine& last = p.lines.back();
  ProofLine ln;
  ln.id = last.id + 1;
  if (ln.id == 0) throw StructureError("line id overflow");
  ln.formula = prop::substitute(last.formula, sigma);
  ln.rule.kind = Rule::Kind::Sub;
  ln.rule.i = last.id;
  ln.rule.sigma = sigma;
  out.lines.push_back(std::move(ln));
  return out;
}

// --- base64 --------------------------------------------------------------

namespace {
constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
  }
  size_t rest = bytes.size() - i;
  if (rest == 1) {
    uint32_t v = bytes[i] << 16;
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParseError("base64 length not a multiple of 4", 0);
  std::vector<uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    uint32_t v = 0;
    for (size_t j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2) throw ParseError("bad base64 padding", i + j);
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) throw ParseError("bad base64 padding", i + j);
      int d = b64_value(c);
      if (d < 0) throw ParseError("bad base64 character", i + j);
      v = (v << 6) | static_cast<uint32_t>(d);
    }
    out.push_back((v >> 16) & 0xff);
    if (pad < 2) out.push_back((v >> 8) & 0xff);
    if (pad < 1) out.push_back(v & 0xff);
  }
  return out;
}

// --- text format ---------------------------------------------------------

namespace {

void render_sigma(const std::map<prop::Atom, prop::Formula>& sigma,
                  std::string& out) {
  out += '{';
  bool first = true;
  for (const auto& [atom, img] : sigma) {
    if (!first) out += ';';
    first = false;
    out += atom.text();
    out += ":=";
    out += prop::render(img);
  }
  out += '}';
}

void render_lines(const Proof& p, std::string& out) {
  std::vector<std::pair<size_t, std::string>> comments = p.comments;
  std::stable_sort(comments.begin(), comments.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  size_t ci = 0;
  for (size_t k = 0; k < p.premises.size(); ++k) {
    out += "PREMISE " + std::to_string(k) + " " + prop::render(p.premises[k]) + "\n";
  }
  for (size_t i = 0; i <= p.lines.size(); ++i) {
    while (ci < comments.size() && comments[ci].first <= i) {
      out += "# " + comments[ci].second + "\n";
      ++ci;
    }
    if (i == p.lines.size()) break;
    const ProofLine& ln = p.lines[i];
    out += "LINE " + std::to_string(ln.id) + " " + prop::render(ln.formula) + " ";
    switch (ln.rule.kind) {
      case Rule::Kind::Axiom:
        out += "AX " + ln.rule.schema;
        break;
      case Rule::Kind::Mp:
        out += "MP " + std::to_string(ln.rule.i) + " " + std::to_string(ln.rule.j);
        break;
      case Rule::Kind::Sub:
        out += "SUB " + std::to_string(ln.rule.i) + " ";
        render_sigma(ln.rule.sigma, out);
        break;
      case Rule::Kind::Premise:
        out += "PREM " + std::to_string(ln.rule.k);
        break;
      case Rule::Kind::Import:
        out += "IMPORT " + std::to_string(ln.rule.k);
        break;
    }
    out += '\n';
  }
}

}  // namespace

std::string render_proof(const Proof& p) {
  std::string out;
  render_lines(p, out);
  return out;
}

std::string render_fplus(const FPlusProof& p) {
  std::string out;
  for (size_t k = 0; k < p.imports.size(); ++k) {
    out += "IMPORT " + std::to_string(k) + " " +
           prop::render(p.imports[k].tautology) + " BASEPROOF " +
           base64_encode(p.imports[k].base_proof) + "\n";
  }
  render_lines(p.derivation, out);
  return out;
}

namespace {

struct LineScanner {
  std::string_view line;
  size_t offset;  // offset of this line in the whole text, for errors
  size_t pos = 0;

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= line.size();
  }
  std::string word() {
    skip_ws();
    size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos == start) throw ParseError("expected a token", offset + pos);
    return std::string(line.substr(start, pos - start));
  }
  uint64_t number() {
    std::string w = word();
    if (w.empty() || w.size() > 19 ||
        !std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError("expected a number, got '" + w + "'", offset + pos);
    uint64_t v = 0;
    for (char c : w) v = v * 10 + static_cast<uint64_t>(c - '0');
    return v;
  }
  prop::Formula formula() {
    skip_ws();
    size_t consumed = 0;
    prop::Formula f;
    try {
      f = prop::parse_formula_prefix(line.substr(pos), &consumed);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), offset + pos);
    }
    pos += consumed;
    return f;
  }
  std::string rest() {
    skip_ws();
    std::string r(line.substr(pos));
    while (!r.empty() && (r.back() == ' ' || r.back() == '\t')) r.pop_back();
    pos = line.size();
    return r;
  }
  void end() {
    if (!done()) throw ParseError("trailing input on line", offset + pos);
  }
};

std::map<prop::Atom, prop::Formula> parse_sigma(std::string_view text, size_t offset) {
  std::map<prop::Atom, prop::Formula> sigma;
  size_t open = text.find('{');
  size_t close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw ParseError("substitution map needs {...}", offset);
  std::string_view body = text.substr(open + 1, close - open - 1);
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find(';', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view entry = body.substr(pos, end - pos);
    size_t sep = entry.find(":=");
    if (sep == std::string_view::npos)
      throw ParseError("substitution entry needs ':='", offset + pos);
    prop::Atom atom = prop::parse_atom(entry.substr(0, sep));
    prop::Formula img = prop::parse_formula(entry.substr(sep + 2));
    if (!sigma.emplace(atom, img).second)
      throw ParseError("duplicate substitution atom '" + atom.text() + "'", offset + pos);
    pos = end + (end < body.size() ? 1 : 0);
  }
  return sigma;
}

struct ParsedText {
  std::vector<Import> imports;
  Proof proof;
};

ParsedText parse_text(std::string_view text, bool allow_imports) {
  ParsedText out;
  size_t offset = 0;
  bool seen_body = false;  // any PREMISE or LINE yet
  while (offset <= text.size()) {
    size_t eol = text.find('\n', offset);
    std::string_view line =
        text.substr(offset, (eol == std::string_view::npos ? text.size() : eol) - offset);
    size_t line_offset = offset;
    offset = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
      if (eol == std::string_view::npos) break;
      continue;
    }
    if (line[first] == '#') {
      std::string_view body = line.substr(first + 1);
      if (!body.empty() && body[0] == ' ') body.remove_prefix(1);
      while (!body.empty() && (body.back() == '\r' || body.back() == ' ')) body.remove_suffix(1);
      out.proof.comments.emplace_back(out.proof.lines.size(), std::string(body));
      if (eol == std::string_view::npos) break;
      continue;
    }
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineScanner sc{line, line_offset};
    std::string head = sc.word();
    if (head == "PREMISE") {
      uint64_t k = sc.number();
      if (k != out.proof.premises.size())
        throw ParseError("premise index out of order", line_offset);
      out.proof.premises.push_back(sc.formula());
      sc.end();
      seen_body = true;
    } else if (head == "IMPORT") {
      if (!allow_imports)
        throw ParseError("import header in a plain proof", line_offset);
      if (seen_body)
        throw ParseError("import header after the derivation started", line_offset);
      uint64_t k = sc.number();
      if (k != out.imports.size())
        throw ParseError("import index out of order", line_offset);
      Import imp;
      imp.tautology = sc.formula();
      std::string kw = sc.word();
      if (kw != "BASEPROOF")
        throw ParseError("expected BASEPROOF, got '" + kw + "'", line_offset);
      std::string payload = sc.rest();
      imp.base_proof = base64_decode(payload);
      out.imports.push_back(std::move(imp));
    } else if (head == "LINE") {
      ProofLine ln;
      ln.id = sc.number();
      ln.formula = sc.formula();
      std::string rule = sc.word();
      if (rule == "AX") {
        ln.rule.kind = Rule::Kind::Axiom;
        ln.rule.schema = sc.word();
        sc.end();
      } else if (rule == "MP") {
        ln.rule.kind = Rule::Kind::Mp;
        ln.rule.i = sc.number();
        ln.rule.j = sc.number();
        sc.end();
      } else if (rule == "SUB") {
        ln.rule.kind = Rule::Kind::Sub;
        ln.rule.i = sc.number();
        ln.rule.sigma = parse_sigma(sc.rest(), line_offset);
      } else if (rule == "PREM") {
        ln.rule.kind = Rule::Kind::Premise;
        ln.rule.k = sc.number();
        sc.end();
      } else if (rule == "IMPORT") {
        ln.rule.kind = Rule::Kind::Import;
        ln.rule.k = sc.number();
        sc.end();
      } else {
        throw ParseError("unknown rule '" + rule + "'", line_offset);
      }
      out.proof.lines.push_back(std::move(ln));
      seen_body = true;
    } else {
      throw ParseError("unknown directive '" + head + "'", line_offset);
    }
    if (eol == std::string_view::npos) break;
  }
  return out;
}

}  // namespace

Proof parse_proof(std::string_view text) {
  return parse_text(text, false).proof;
}

FPlusProof parse_fplus(std::string_view text) {
  ParsedText parsed = parse_text(text, true);
  FPlusProof out;
  out.imports = std::move(parsed.imports);
  out.derivation = std::move(parsed.proof);
  return out;
}

bool looks_like_fplus(std::string_view text) {
  size_t offset = 0;
  while (offset < text.size()) {
    size_t eol = text.find('\n', offset);
    std::string_view line =
        text.substr(offset, (eol == std::string_view::npos ? text.size() : eol) - offset);
    offset = eol == std::string_view::npos ? text.size() : eol + 1;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    return line.substr(first).rfind("IMPORT ", 0) == 0;
  }
  return false;
}

}  // namespace reduct::proofs
