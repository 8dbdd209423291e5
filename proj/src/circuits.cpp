#include "reduct/circuits.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reduct/errors.hpp"
#include "reduct/evalenc.hpp"
#include "reduct/taut.hpp"

namespace reduct::circuits {

namespace {

const char* op_name(GateOp op) {
  switch (op) {
    case GateOp::Input: return "INPUT";
    case GateOp::Const0: return "CONST0";
    case GateOp::Const1: return "CONST1";
    case GateOp::And: return "AND";
    case GateOp::Or: return "OR";
    case GateOp::Not: return "NOT";
  }
  return "";
}

}  // namespace

void validate_circuit(const Circuit& c) {
  if (c.gates.empty()) throw StructureError("circuit has no gates");
  for (uint64_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    const bool unary = g.op == GateOp::Not;
    const bool binary = g.op == GateOp::And || g.op == GateOp::Or;
    if (!unary && !binary) {
      if (g.a != 0 || g.b != 0)
        throw StructureError("source gate carries input references");
      continue;
    }
    if (g.a >= i) throw StructureError("gate input must point backwards");
    if (binary) {
      if (g.b >= i) throw StructureError("gate input must point backwards");
    } else if (g.b != 0) {
      throw StructureError("NOT gate carries a second input");
    }
  }
  if (c.accept >= c.gates.size())
    throw StructureError("accept wire names no gate");
  for (uint64_t y : c.ybits)
    if (y >= c.gates.size()) throw StructureError("output wire names no gate");
}

uint64_t input_count(const Circuit& c) {
  uint64_t n = 0;
  for (const Gate& g : c.gates) n += g.op == GateOp::Input;
  return n;
}

StringValue run_circuit(const Circuit& c, const std::vector<bool>& inputs) {
  validate_circuit(c);
  if (inputs.size() != input_count(c))
    throw StructureError("wrong number of circuit inputs");
  std::vector<bool> w(c.gates.size() + 1);
  uint64_t next = 0;
  for (uint64_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    switch (g.op) {
      case GateOp::Input: w[i] = inputs[next++]; break;
      case GateOp::Const0: w[i] = false; break;
      case GateOp::Const1: w[i] = true; break;
      case GateOp::And: w[i] = w[g.a] && w[g.b]; break;
      case GateOp::Or: w[i] = w[g.a] || w[g.b]; break;
      case GateOp::Not: w[i] = !w[g.a]; break;
    }
  }
  w[c.gates.size()] = true;  // sentinel pins |W| to gates + 1
  return StringValue::from_bits(std::move(w));
}

std::string render_circuit(const Circuit& c) {
  validate_circuit(c);
  std::string out;
  for (uint64_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    out += std::to_string(i);
    out += ' ';
    out += op_name(g.op);
    if (g.op == GateOp::Not || g.op == GateOp::And || g.op == GateOp::Or) {
      out += ' ';
      out += std::to_string(g.a);
    }
    if (g.op == GateOp::And || g.op == GateOp::Or) {
      out += ' ';
      out += std::to_string(g.b);
    }
    out += '\n';
  }
  out += "ACCEPT ";
  out += std::to_string(c.accept);
  out += "\nYBITS";
  for (uint64_t y : c.ybits) {
    out += ' ';
    out += std::to_string(y);
  }
  out += '\n';
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

uint64_t parse_gate_id(std::string_view tok, size_t pos) {
  if (tok.empty() || tok.size() > 18 || (tok.size() > 1 && tok[0] == '0'))
    throw ParseError("bad gate id", pos);
  uint64_t v = 0;
  for (char ch : tok) {
    if (ch < '0' || ch > '9') throw ParseError("bad gate id", pos);
    v = v * 10 + uint64_t(ch - '0');
  }
  return v;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  bool saw_accept = false;
  bool saw_ybits = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    const size_t here = pos;
    pos = eol + (eol < text.size() ? 1 : 0);
    const std::vector<std::string_view> toks = split_fields(line);
    if (toks.empty()) continue;
    if (saw_ybits) throw ParseError("text after YBITS trailer", here);
    if (toks[0] == "ACCEPT") {
      if (saw_accept || toks.size() != 2)
        throw ParseError("misplaced ACCEPT line", here);
      c.accept = parse_gate_id(toks[1], here);
      saw_accept = true;
      continue;
    }
    if (toks[0] == "YBITS") {
      if (!saw_accept) throw ParseError("YBITS before ACCEPT", here);
      for (size_t k = 1; k < toks.size(); ++k)
        c.ybits.push_back(parse_gate_id(toks[k], here));
      saw_ybits = true;
      continue;
    }
    if (saw_accept) throw ParseError("gate after ACCEPT trailer", here);
    if (toks.size() < 2) throw ParseError("missing gate kind", here);
    if (parse_gate_id(toks[0], here) != c.gates.size())
      throw ParseError("gate ids must count up from 0", here);
    Gate g;
    size_t arity = 0;
    if (toks[1] == "INPUT") {
      g.op = GateOp::Input;
    } else if (toks[1] == "CONST0") {
      g.op = GateOp::Const0;
    } else if (toks[1] == "CONST1") {
      g.op = GateOp::Const1;
    } else if (toks[1] == "NOT") {
      g.op = GateOp::Not;
      arity = 1;
    } else if (toks[1] == "AND") {
      g.op = GateOp::And;
      arity = 2;
    } else if (toks[1] == "OR") {
      g.op = GateOp::Or;
      arity = 2;
    } else {
      throw ParseError("unknown gate kind", here);
    }
    if (toks.size() != 2 + arity)
      throw ParseError("wrong input count for gate kind", here);
    if (arity >= 1) g.a = parse_gate_id(toks[2], here);
    if (arity >= 2) g.b = parse_gate_id(toks[3], here);
    c.gates.push_back(g);
  }
  if (!saw_accept || !saw_ybits)
    throw ParseError("missing ACCEPT or YBITS trailer", text.size());
  validate_circuit(c);
  return c;
}

sigma::FormulaPtr gen_phi_g(const ProofSystemSpec& spec, uint64_t len_u,
                            uint64_t len_y) {
  if (len_u == 0 || len_y == 0)
    throw StructureError("string lengths count the sentinel, so they are positive");
  const Circuit c = spec.circuit_family(len_u, len_y);
  validate_circuit(c);
  if (input_count(c) != len_u - 1)
    throw StructureError("circuit must read every non-sentinel bit of U");
  if (c.ybits.size() != len_y - 1)
    throw StructureError("circuit must emit every non-sentinel bit of Y");

  // One shared atom per wire; the numerals inside dominate the formula's
  // size, so building them once per gate matters at verifier scale.
  std::vector<sigma::FormulaPtr> w_at(c.gates.size());
  for (uint64_t i = 0; i < c.gates.size(); ++i)
    w_at[i] = sigma::f_in("W", sigma::t_num(i));

  std::vector<sigma::FormulaPtr> parts;
  parts.reserve(c.gates.size() + c.ybits.size() + 1);
  uint64_t next = 0;
  for (uint64_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    switch (g.op) {
      case GateOp::Input:
        parts.push_back(
            sigma::f_iff(w_at[i], sigma::f_in("U", sigma::t_num(next++))));
        break;
      case GateOp::Const0:
        parts.push_back(sigma::f_not(w_at[i]));
        break;
      case GateOp::Const1:
        parts.push_back(w_at[i]);
        break;
      case GateOp::And:
        parts.push_back(
            sigma::f_iff(w_at[i], sigma::f_and(w_at[g.a], w_at[g.b])));
        break;
      case GateOp::Or:
        parts.push_back(
            sigma::f_iff(w_at[i], sigma::f_or(w_at[g.a], w_at[g.b])));
        break;
      case GateOp::Not:
        parts.push_back(sigma::f_iff(w_at[i], sigma::f_not(w_at[g.a])));
        break;
    }
  }
  parts.push_back(w_at[c.accept]);
  for (uint64_t r = 0; r + 1 < len_y; ++r)
    parts.push_back(
        sigma::f_iff(w_at[c.ybits[r]], sigma::f_in("Y", sigma::t_num(r))));
  return sigma::f_and_all(std::move(parts));
}

translate::LengthProfile SoundProfile::profile() const {
  translate::LengthProfile prof;
  prof.lengths["U"] = len_u;
  prof.lengths["W"] = len_w;
  prof.lengths["X"] = len_x;
  prof.lengths["Y"] = len_y;
  prof.lengths["Z"] = len_z;
  return prof;
}

sigma::FormulaPtr build_sound_g(const ProofSystemSpec& spec,
                                const SoundProfile& p) {
  const uint64_t min_y = evalenc::kHeaderBits + evalenc::kRecordBits + 1;
  if (p.len_y < min_y ||
      (p.len_y - evalenc::kHeaderBits - 1) % evalenc::kRecordBits != 0)
    throw StructureError("Y length is off the record grid");
  const uint64_t nodes =
      (p.len_y - evalenc::kHeaderBits - 1) / evalenc::kRecordBits;
  if (nodes > evalenc::kNodeCap)
    throw StructureError("Y length is past the node cap");
  if (p.len_z != nodes + 1)
    throw StructureError("Z needs one bit per encoded node plus the sentinel");
  if (p.len_x == 0 || p.len_u == 0)
    throw StructureError("string lengths count the sentinel, so they are positive");
  const Circuit c = spec.circuit_family(p.len_u, p.len_y);
  if (p.len_w != c.gates.size() + 1)
    throw StructureError("W needs one bit per gate plus the sentinel");
  return sigma::f_imp(
      sigma::f_and(evalenc::generate_eval(), gen_phi_g(spec, p.len_u, p.len_y)),
      sigma::f_in("Z", sigma::t_zero()));
}

namespace {

// Gate emitter with hash-consing and constant folding, so the shared
// subcircuits below (field comparators, kind selectors) cost one gate no
// matter how often they are requested.
class Builder {
 public:
  uint64_t input() {
    gates_.push_back({GateOp::Input, 0, 0});
    return gates_.size() - 1;
  }

  uint64_t constant(bool v) {
    std::optional<uint64_t>& slot = v ? one_ : zero_;
    if (!slot) {
      gates_.push_back({v ? GateOp::Const1 : GateOp::Const0, 0, 0});
      slot = gates_.size() - 1;
    }
    return *slot;
  }

  uint64_t bnot(uint64_t a) {
    if (is_const(a, false)) return constant(true);
    if (is_const(a, true)) return constant(false);
    return emit(GateOp::Not, a, 0);
  }

  uint64_t band(uint64_t a, uint64_t b) {
    if (is_const(a, false) || is_const(b, false)) return constant(false);
    if (is_const(a, true)) return b;
    if (is_const(b, true)) return a;
    if (a == b) return a;
    return emit(GateOp::And, std::min(a, b), std::max(a, b));
  }

  uint64_t bor(uint64_t a, uint64_t b) {
    if (is_const(a, true) || is_const(b, true)) return constant(true);
    if (is_const(a, false)) return b;
    if (is_const(b, false)) return a;
    if (a == b) return a;
    return emit(GateOp::Or, std::min(a, b), std::max(a, b));
  }

  uint64_t biff(uint64_t a, uint64_t b) {
    return bor(band(a, b), band(bnot(a), bnot(b)));
  }

  uint64_t and_all(const std::vector<uint64_t>& ids) {
    uint64_t acc = constant(true);
    for (uint64_t id : ids) acc = band(acc, id);
    return acc;
  }

  uint64_t or_all(const std::vector<uint64_t>& ids) {
    uint64_t acc = constant(false);
    for (uint64_t id : ids) acc = bor(acc, id);
    return acc;
  }

  Circuit take(uint64_t accept, std::vector<uint64_t> ybits) {
    Circuit c;
    c.gates = std::move(gates_);
    c.accept = accept;
    c.ybits = std::move(ybits);
    validate_circuit(c);
    return c;
  }

 private:
  bool is_const(uint64_t id, bool v) const {
    const std::optional<uint64_t>& slot = v ? one_ : zero_;
    return slot && *slot == id;
  }

  uint64_t emit(GateOp op, uint64_t a, uint64_t b) {
    if (a >= (1ull << 30) || b >= (1ull << 30))
      throw StructureError("circuit too large to build");
    const uint64_t key = (uint64_t(op) << 60) | (a << 30) | b;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    gates_.push_back({op, a, b});
    const uint64_t id = gates_.size() - 1;
    memo_.emplace(key, id);
    return id;
  }

  std::vector<Gate> gates_;
  std::optional<uint64_t> zero_, one_;
  std::unordered_map<uint64_t, uint64_t> memo_;
};

// --- truth-table system -------------------------------------------------

// A proof is an encoded formula (header, records, closing 1) followed by
// one bit per row of its truth table, then the string's own sentinel:
//   |U| = 17 + 20n + 2^l + 1.
// Given |U| there is at most one (l, n) fit per l, and the header bits pin
// n, so at most one candidate shape can validate.

prop::Formula tt_compute(const StringValue& u) {
  const uint64_t len_u = u.length();
  for (uint64_t l = 0; l <= taut::atom_cap(); ++l) {
    const uint64_t rows = 1ull << l;
    if (rows + evalenc::kHeaderBits + evalenc::kRecordBits + 2 > len_u) break;
    const uint64_t rem = len_u - evalenc::kHeaderBits - 2 - rows;
    if (rem % evalenc::kRecordBits != 0) continue;
    const uint64_t n = rem / evalenc::kRecordBits;
    if (n > evalenc::kNodeCap) continue;
    // l distinct ranks need l distinct atom records
    if (l > n) continue;
    const uint64_t enc_bits = evalenc::kHeaderBits + evalenc::kRecordBits * n;
    if (!u.bit(enc_bits)) continue;  // the encoding's own closing 1
    std::vector<bool> prefix(u.bits().begin(),
                             u.bits().begin() + long(enc_bits) + 1);
    prop::Formula a;
    try {
      a = evalenc::decode_formula(StringValue::from_bits(std::move(prefix)), 1);
    } catch (const StructureError&) {
      continue;
    }
    if (prop::atoms(a).size() != l) continue;
    const taut::CompiledEval ce(a);
    const uint64_t tab = enc_bits + 1;
    bool ok = true;
    for (uint64_t r = 0; r < rows && ok; ++r)
      ok = u.bit(tab + r) && ce.run(r);
    if (ok) return a;
  }
  return prop::f_true();
}

Circuit tt_circuit(uint64_t len_u, uint64_t len_y) {
  if (len_u == 0 || len_y == 0)
    throw StructureError("string lengths count the sentinel, so they are positive");
  Builder bld;
  std::vector<uint64_t> in;
  in.reserve(len_u - 1);
  for (uint64_t k = 0; k + 1 < len_u; ++k) in.push_back(bld.input());
  const auto lit = [&](uint64_t k, bool v) {
    return v ? in[k] : bld.bnot(in[k]);
  };

  std::vector<uint64_t> valids;
  uint64_t match_y = bld.constant(false);
  bool have_match = false;
  for (uint64_t l = 0; l <= taut::atom_cap(); ++l) {
    const uint64_t rows = 1ull << l;
    if (rows + evalenc::kHeaderBits + evalenc::kRecordBits + 2 > len_u) break;
    const uint64_t rem = len_u - evalenc::kHeaderBits - 2 - rows;
    if (rem % evalenc::kRecordBits != 0) continue;
    const uint64_t n = rem / evalenc::kRecordBits;
    if (n > evalenc::kNodeCap) continue;
    // l distinct ranks need l distinct atom records, so these candidate
    // shapes can never validate; dropping them matches compute, which
    // rejects them at the atom-count check
    if (l > n) continue;
    const uint64_t enc_bits = evalenc::kHeaderBits + evalenc::kRecordBits * n;
    const uint64_t tab = enc_bits + 1;

    const auto rec = [&](uint64_t i) {
      return evalenc::kHeaderBits + evalenc::kRecordBits * i;
    };
    // 8-bit field equal to the constant v; the left field doubles as the
    // atom rank.
    const auto cmp_field = [&](uint64_t base, uint64_t v) {
      uint64_t acc = bld.constant(true);
      for (uint64_t b = 0; b < evalenc::kFieldBits; ++b)
        acc = bld.band(acc, lit(base + b, (v >> b) & 1));
      return acc;
    };
    const auto cmp_left = [&](uint64_t i, uint64_t v) {
      return cmp_field(rec(i) + evalenc::kKindBits, v);
    };
    const auto cmp_right = [&](uint64_t i, uint64_t v) {
      return cmp_field(rec(i) + evalenc::kKindBits + evalenc::kFieldBits, v);
    };
    const auto field_zero = [&](uint64_t base) {
      uint64_t acc = bld.constant(true);
      for (uint64_t b = 0; b < evalenc::kFieldBits; ++b)
        acc = bld.band(acc, bld.bnot(in[base + b]));
      return acc;
    };
    const auto sel = [&](uint64_t i, uint64_t kind) {
      uint64_t acc = bld.constant(true);
      for (uint64_t b = 0; b < evalenc::kKindBits; ++b)
        acc = bld.band(acc, lit(rec(i) + b, (kind >> b) & 1));
      return acc;
    };

    std::vector<uint64_t> req;
    // header == n, low bit first
    for (uint64_t b = 0; b < evalenc::kHeaderBits; ++b)
      req.push_back(lit(b, (n >> b) & 1));
    req.push_back(in[enc_bits]);

    for (uint64_t i = 0; i < n; ++i) {
      // kind <= 6: top bit clear and not all of the low three set
      req.push_back(bld.band(
          bld.bnot(in[rec(i) + 3]),
          bld.bnot(bld.band(in[rec(i)],
                            bld.band(in[rec(i) + 1], in[rec(i) + 2])))));
      const uint64_t zl = field_zero(rec(i) + evalenc::kKindBits);
      const uint64_t zr =
          field_zero(rec(i) + evalenc::kKindBits + evalenc::kFieldBits);
      uint64_t in_l = bld.constant(false);
      uint64_t in_r = bld.constant(false);
      for (uint64_t j = i + 1; j < n; ++j) {
        in_l = bld.bor(in_l, cmp_left(i, j));
        in_r = bld.bor(in_r, cmp_right(i, j));
      }
      uint64_t rank_ok = bld.constant(false);
      for (uint64_t v = 0; v < l; ++v)
        rank_ok = bld.bor(rank_ok, cmp_left(i, v));
      const uint64_t leaf = bld.bor(sel(i, 0), sel(i, 1));
      req.push_back(bld.bor(bld.bnot(leaf), bld.band(zl, zr)));
      req.push_back(bld.bor(bld.bnot(sel(i, 2)), bld.band(rank_ok, zr)));
      req.push_back(bld.bor(bld.bnot(sel(i, 3)), bld.band(in_l, zr)));
      const uint64_t bin = bld.bor(sel(i, 4), bld.bor(sel(i, 5), sel(i, 6)));
      req.push_back(bld.bor(bld.bnot(bin), bld.band(in_l, in_r)));
    }

    // no two identical records (sharing makes encodings duplicate-free)
    for (uint64_t i = 0; i < n; ++i)
      for (uint64_t j = i + 1; j < n; ++j) {
        uint64_t same = bld.constant(true);
        for (uint64_t b = 0; b < evalenc::kRecordBits; ++b)
          same = bld.band(same, bld.biff(in[rec(i) + b], in[rec(j) + b]));
        req.push_back(bld.bnot(same));
      }

    // every record reachable from the root record
    std::vector<uint64_t> mark(n);
    mark[0] = bld.constant(true);
    for (uint64_t j = 1; j < n; ++j) {
      uint64_t m = bld.constant(false);
      for (uint64_t i = 0; i < j; ++i) {
        const uint64_t has_l =
            bld.bor(sel(i, 3), bld.bor(sel(i, 4), bld.bor(sel(i, 5), sel(i, 6))));
        const uint64_t has_r = bld.bor(sel(i, 4), bld.bor(sel(i, 5), sel(i, 6)));
        const uint64_t via = bld.bor(bld.band(has_l, cmp_left(i, j)),
                                     bld.band(has_r, cmp_right(i, j)));
        m = bld.bor(m, bld.band(mark[i], via));
      }
      mark[j] = m;
      req.push_back(m);
    }

    // atom ranks cover 0..l-1
    for (uint64_t v = 0; v < l; ++v) {
      uint64_t used = bld.constant(false);
      for (uint64_t i = 0; i < n; ++i)
        used = bld.bor(used, bld.band(sel(i, 2), cmp_left(i, v)));
      req.push_back(used);
    }

    // every table bit set and equal to the row evaluation; values are
    // computed bottom-up (higher record index first)
    for (uint64_t r = 0; r < rows; ++r) {
      std::vector<uint64_t> val(n);
      for (uint64_t i = n; i-- > 0;) {
        uint64_t lv = bld.constant(false);
        uint64_t rv = bld.constant(false);
        for (uint64_t j = i + 1; j < n; ++j) {
          lv = bld.bor(lv, bld.band(cmp_left(i, j), val[j]));
          rv = bld.bor(rv, bld.band(cmp_right(i, j), val[j]));
        }
        uint64_t av = bld.constant(false);
        for (uint64_t v = 0; v < l; ++v)
          if ((r >> v) & 1) av = bld.bor(av, cmp_left(i, v));
        uint64_t acc = sel(i, 1);
        acc = bld.bor(acc, bld.band(sel(i, 2), av));
        acc = bld.bor(acc, bld.band(sel(i, 3), bld.bnot(lv)));
        acc = bld.bor(acc, bld.band(sel(i, 4), bld.band(lv, rv)));
        acc = bld.bor(acc, bld.band(sel(i, 5), bld.bor(lv, rv)));
        acc = bld.bor(acc, bld.band(sel(i, 6), bld.bor(bld.bnot(lv), rv)));
        val[i] = acc;
      }
      req.push_back(bld.band(in[tab + r], val[0]));
    }

    const uint64_t valid = bld.and_all(req);
    valids.push_back(valid);
    if (enc_bits + 1 == len_y) {
      match_y = bld.bor(match_y, valid);
      have_match = true;
    }
  }

  const uint64_t any_valid = bld.or_all(valids);
  const StringValue top_enc = evalenc::encode_formula(prop::f_true());
  const bool top_len = len_y == top_enc.length();
  uint64_t accept = match_y;
  uint64_t fallback = bld.constant(false);
  if (top_len) {
    fallback = bld.bnot(any_valid);
    accept = bld.bor(accept, fallback);
  }
  std::vector<uint64_t> ybits(len_y - 1, bld.constant(false));
  for (uint64_t r = 0; r + 1 < len_y; ++r) {
    uint64_t term = bld.constant(false);
    // when the valid encoding has |Y|'s length, Y is a prefix of U
    if (have_match) term = bld.band(match_y, in[r]);
    if (top_len && top_enc.bit(r)) term = bld.bor(term, fallback);
    ybits[r] = term;
  }
  return bld.take(accept, std::move(ybits));
}

// --- formula-family systems ----------------------------------------------

struct FormulaFamily {
  sigma::FormulaPtr phi;
  std::vector<std::string> vars;  // free string variables, name order
};

// Unary length tuple below the sentinel: n_1 ones, 0, ..., 0, n_v ones.
// Malformed exactly when the separator count is off.
std::optional<std::vector<uint64_t>> unary_lengths(const FormulaFamily& fam,
                                                   const StringValue& u) {
  if (u.length() == 0) return std::nullopt;
  std::vector<uint64_t> runs{0};
  for (uint64_t t = 0; t + 1 < u.length(); ++t) {
    if (u.bit(t))
      ++runs.back();
    else
      runs.push_back(0);
  }
  if (runs.size() != fam.vars.size()) return std::nullopt;
  return runs;
}

prop::Formula family_value(const FormulaFamily& fam,
                           const std::vector<uint64_t>& ns) {
  translate::LengthProfile prof;
  for (size_t i = 0; i < fam.vars.size(); ++i)
    prof.lengths[fam.vars[i]] = ns[i];
  prop::Formula t;
  try {
    t = translate::translate(fam.phi, prof);
  } catch (const CapExceeded&) {
    return prop::f_true();
  } catch (const EvalError&) {
    return prop::f_true();
  }
  if (prop::node_count(t) > evalenc::kNodeCap) return prop::f_true();
  const std::vector<prop::Atom> at = prop::atoms(t);
  std::map<prop::Atom, prop::Formula> relabel;
  for (size_t j = 0; j < at.size(); ++j)
    relabel[at[j]] = prop::f_atom(prop::Atom::named(uint64_t(j + 1)));
  return prop::substitute(t, relabel);
}

prop::Formula family_compute(const FormulaFamily& fam, const StringValue& u) {
  const std::optional<std::vector<uint64_t>> ns = unary_lengths(fam, u);
  if (!ns) return prop::f_true();
  return family_value(fam, *ns);
}

Circuit family_circuit(const FormulaFamily& fam, uint64_t len_u,
                       uint64_t len_y) {
  if (len_u == 0 || len_y == 0)
    throw StructureError("string lengths count the sentinel, so they are positive");
  const uint64_t v = fam.vars.size();
  Builder bld;
  std::vector<uint64_t> in;
  in.reserve(len_u - 1);
  for (uint64_t k = 0; k + 1 < len_u; ++k) in.push_back(bld.input());

  std::vector<uint64_t> matches;
  uint64_t accept = bld.constant(false);
  std::vector<uint64_t> yterms(len_y - 1, bld.constant(false));
  uint64_t count = 0;
  std::vector<uint64_t> ns(v, 0);
  // every composition of the payload ones into v blocks is one candidate
  const std::function<void(size_t, uint64_t)> walk = [&](size_t idx,
                                                         uint64_t left) {
    if (idx + 1 == v) {
      ns[idx] = left;
      if (++count > 4096)
        throw CapExceeded("too many length tuples at this input size");
      uint64_t match = bld.constant(true);
      uint64_t pos = 0;
      for (size_t i = 0; i < v; ++i) {
        if (i) match = bld.band(match, bld.bnot(in[pos++]));
        for (uint64_t t = 0; t < ns[i]; ++t)
          match = bld.band(match, in[pos++]);
      }
      matches.push_back(match);
      const StringValue enc = evalenc::encode_formula(family_value(fam, ns));
      if (enc.length() != len_y) return;
      accept = bld.bor(accept, match);
      for (uint64_t r = 0; r + 1 < len_y; ++r)
        if (enc.bit(r)) yterms[r] = bld.bor(yterms[r], match);
      return;
    }
    for (uint64_t take = 0; take <= left; ++take) {
      ns[idx] = take;
      walk(idx + 1, left - take);
    }
  };
  if (len_u >= v) walk(0, len_u - v);

  const StringValue top_enc = evalenc::encode_formula(prop::f_true());
  if (len_y == top_enc.length()) {
    const uint64_t fb = bld.bnot(bld.or_all(matches));
    accept = bld.bor(accept, fb);
    for (uint64_t r = 0; r + 1 < len_y; ++r)
      if (top_enc.bit(r)) yterms[r] = bld.bor(yterms[r], fb);
  }
  return bld.take(accept, std::move(yterms));
}

}  // namespace

ProofSystemSpec truth_table_system() {
  ProofSystemSpec spec;
  spec.name = "truth-table";
  spec.compute = [](const StringValue& u) { return tt_compute(u); };
  spec.circuit_family = [](uint64_t lu, uint64_t ly) {
    return tt_circuit(lu, ly);
  };
  return spec;
}

StringValue truth_table_proof(prop::Formula f) {
  if (!f) throw StructureError("no formula");
  const std::vector<prop::Atom> at = prop::atoms(f);
  if (at.size() > taut::atom_cap())
    throw CapExceeded("truth table would pass the atom cap");
  const StringValue enc = evalenc::encode_formula(f);
  std::vector<bool> bits = enc.bits();
  const taut::CompiledEval ce(f);
  for (uint64_t r = 0; r < (1ull << at.size()); ++r) bits.push_back(ce.run(r));
  bits.push_back(true);
  return StringValue::from_bits(std::move(bits));
}

ProofSystemSpec make_formula_system(const sigma::FormulaPtr& phi) {
  if (!phi) throw StructureError("no formula");
  const sigma::FreeVars fv = sigma::free_variables(phi);
  if (!fv.nums.empty())
    throw StructureError("free number variables have no length to read off");
  if (fv.strs.empty())
    throw StructureError("need at least one free string variable");
  FormulaFamily fam{phi, {fv.strs.begin(), fv.strs.end()}};
  ProofSystemSpec spec;
  spec.name = "formula-family";
  spec.compute = [fam](const StringValue& u) { return family_compute(fam, u); };
  spec.circuit_family = [fam](uint64_t lu, uint64_t ly) {
    return family_circuit(fam, lu, ly);
  };
  return spec;
}

StringValue formula_system_input(const std::vector<uint64_t>& lengths) {
  std::vector<bool> bits;
  for (size_t i = 0; i < lengths.size(); ++i) {
    if (i) bits.push_back(false);
    bits.insert(bits.end(), lengths[i], true);
  }
  bits.push_back(true);
  return StringValue::from_bits(std::move(bits));
}

std::vector<std::vector<uint64_t>> non_tautology_profiles(
    const sigma::FormulaPtr& phi, uint64_t max_each) {
  if (!phi) throw StructureError("no formula");
  const sigma::FreeVars fv = sigma::free_variables(phi);
  if (!fv.nums.empty())
    throw StructureError("free number variables have no length to read off");
  if (fv.strs.empty())
    throw StructureError("need at least one free string variable");
  const std::vector<std::string> vars(fv.strs.begin(), fv.strs.end());

  uint64_t tuples = 1;
  for (size_t i = 0; i < vars.size(); ++i) {
    tuples *= max_each + 1;
    if (tuples > (1ull << 20))
      throw CapExceeded("too many length tuples to sweep");
  }

  std::vector<std::vector<uint64_t>> bad;
  std::vector<uint64_t> ns(vars.size(), 0);
  for (;;) {
    translate::LengthProfile prof;
    for (size_t i = 0; i < vars.size(); ++i) prof.lengths[vars[i]] = ns[i];
    if (!taut::is_tautology_bruteforce(translate::translate(phi, prof)))
      bad.push_back(ns);
    size_t i = 0;
    while (i < ns.size() && ns[i] == max_each) ns[i++] = 0;
    if (i == ns.size()) break;
    ++ns[i];
  }
  return bad;
}

proofs::BaseSystemHandle truth_table_base() {
  proofs::BaseSystemHandle h;
  h.name = "truth-table";
  h.verify = [](const std::vector<uint8_t>& bytes) -> prop::Formula {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                                bytes.size());
    const size_t nl = text.find('\n');
    if (nl == std::string_view::npos) return {};
    prop::Formula f;
    try {
      f = prop::parse_formula(text.substr(0, nl));
    } catch (const ParseError&) {
      return {};
    }
    std::string_view table = text.substr(nl + 1);
    if (!table.empty() && table.back() == '\n') table.remove_suffix(1);
    const std::vector<prop::Atom> at = prop::atoms(f);
    if (at.size() > taut::atom_cap()) return {};
    const uint64_t rows = 1ull << at.size();
    if (table.size() != rows) return {};
    const taut::CompiledEval ce(f);
    for (uint64_t r = 0; r < rows; ++r)
      if (table[r] != '1' || !ce.run(r)) return {};
    return f;
  };
  return h;
}

std::vector<uint8_t> truth_table_base_proof(prop::Formula f) {
  if (!f) throw StructureError("no formula");
  const std::vector<prop::Atom> at = prop::atoms(f);
  if (at.size() > taut::atom_cap())
    throw CapExceeded("truth table would pass the atom cap");
  std::string text = prop::render(f);
  text += '\n';
  const taut::CompiledEval ce(f);
  for (uint64_t r = 0; r < (1ull << at.size()); ++r)
    text += ce.run(r) ? '1' : '0';
  return {text.begin(), text.end()};
}

}  // namespace reduct::circuits
