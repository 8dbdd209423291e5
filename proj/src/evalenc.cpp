#include "reduct/evalenc.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "reduct/errors.hpp"
#include "reduct/prover.hpp"

namespace reduct::evalenc {

using prop::Formula;
using sigma::FormulaPtr;
using sigma::TermPtr;
using reduct::StringValue;

std::vector<Formula> encode_order(Formula f) {
  if (!f) throw StructureError("encode_order needs a formula");
  // Postorder over the DAG (left, right, node; first visit wins), then
  // reversed: root lands at 0 and children strictly after parents.
  std::vector<Formula> post;
  std::unordered_set<const prop::Node*> seen;
  std::vector<std::pair<Formula, bool>> stack{{f, false}};
  while (!stack.empty()) {
    auto [g, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      post.push_back(g);
      continue;
    }
    if (!seen.insert(g.node()).second) continue;
    stack.emplace_back(g, true);
    if (g.right()) stack.emplace_back(g.right(), false);
    if (g.left()) stack.emplace_back(g.left(), false);
  }
  std::reverse(post.begin(), post.end());
  return post;
}

namespace {

bool plain_number(const std::string& s, uint64_t* out) {
  if (s.empty() || s.size() > 9) return false;
  uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<uint64_t>(c - '0');
  }
  if (std::to_string(v) != s) return false;  // no leading zeros
  *out = v;
  return true;
}

// Atom rank = position in numeric label order.  Labels must be the plain
// numbers base..base+l-1 for base 0 or 1.
std::map<prop::Atom, uint64_t> atom_ranks(Formula f) {
  std::vector<prop::Atom> order = prop::atoms(f);
  std::map<prop::Atom, uint64_t> ranks;
  for (size_t j = 0; j < order.size(); ++j) {
    uint64_t num = 0;
    if (order[j].kind != prop::Atom::Kind::Named ||
        !plain_number(order[j].name, &num))
      throw StructureError("encoding needs numerically named atoms, got " +
                           order[j].text());
    uint64_t base = order[0].name == "0" ? 0 : 1;
    if (num != base + j)
      throw StructureError("atom labels are not contiguous at " +
                           order[j].text());
    ranks.emplace(order[j], j);
  }
  return ranks;
}

void pack_field(std::vector<bool>& bits, uint64_t at, uint64_t width,
                uint64_t value) {
  for (uint64_t b = 0; b < width; ++b) bits[at + b] = (value >> b) & 1;
}

}  // namespace

StringValue encode_formula(Formula f) {
  std::vector<Formula> order = encode_order(f);
  if (order.size() > kNodeCap)
    throw StructureError("formula exceeds the encoding node cap");
  std::map<prop::Atom, uint64_t> ranks = atom_ranks(f);
  std::unordered_map<const prop::Node*, uint64_t> index;
  for (uint64_t i = 0; i < order.size(); ++i) index.emplace(order[i].node(), i);

  uint64_t n = order.size();
  std::vector<bool> bits(kHeaderBits + kRecordBits * n + 1, false);
  pack_field(bits, 0, kHeaderBits, n);
  for (uint64_t i = 0; i < n; ++i) {
    Formula g = order[i];
    uint64_t kind = 0, left = 0, right = 0;
    switch (g.op()) {
      case prop::Op::False:
        kind = 0;
        break;
      case prop::Op::True:
        kind = 1;
        break;
      case prop::Op::Atom:
        kind = 2;
        left = ranks.at(g.atom());
        break;
      case prop::Op::Not:
        kind = 3;
        left = index.at(g.left().node());
        break;
      case prop::Op::And:
      case prop::Op::Or:
      case prop::Op::Imp:
        kind = g.op() == prop::Op::And ? 4 : g.op() == prop::Op::Or ? 5 : 6;
        left = index.at(g.left().node());
        right = index.at(g.right().node());
        break;
    }
    uint64_t at = kHeaderBits + kRecordBits * i;
    pack_field(bits, at, kKindBits, kind);
    pack_field(bits, at + kKindBits, kFieldBits, left);
    pack_field(bits, at + kKindBits + kFieldBits, kFieldBits, right);
  }
  bits[bits.size() - 1] = true;
  return StringValue::from_bits(std::move(bits));
}

namespace {

uint64_t read_field(const StringValue& bits, uint64_t at, uint64_t width) {
  uint64_t v = 0;
  for (uint64_t b = 0; b < width; ++b)
    if (bits.bit(at + b)) v |= uint64_t{1} << b;
  return v;
}

}  // namespace

Formula decode_formula(const StringValue& bits, uint64_t atom_base) {
  if (atom_base > 1) throw StructureError("atom base must be 0 or 1");
  uint64_t len = bits.length();
  if (len < kHeaderBits + kRecordBits + 1)
    throw StructureError("encoding shorter than one record");
  if ((len - kHeaderBits - 1) % kRecordBits != 0)
    throw StructureError("encoding length off the record grid");
  uint64_t n = (len - kHeaderBits - 1) / kRecordBits;
  if (n > kNodeCap) throw StructureError("encoding exceeds the node cap");
  if (read_field(bits, 0, kHeaderBits) != n)
    throw StructureError("header node count disagrees with the length");

  struct Rec {
    uint64_t kind, left, right;
  };
  std::vector<Rec> recs(n);
  std::set<std::pair<uint64_t, uint64_t>> dedup;  // (kind, left<<8|right)
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t at = kHeaderBits + kRecordBits * i;
    Rec r{read_field(bits, at, kKindBits),
          read_field(bits, at + kKindBits, kFieldBits),
          read_field(bits, at + kKindBits + kFieldBits, kFieldBits)};
    bool two_children = r.kind >= 4 && r.kind <= 6;
    bool one_child = r.kind == 3;
    if (r.kind > 6) throw StructureError("unknown node kind");
    if (r.kind <= 1 && (r.left != 0 || r.right != 0))
      throw StructureError("constant node with nonzero fields");
    if ((r.kind == 2 || one_child) && r.right != 0)
      throw StructureError("unused right field is nonzero");
    if (one_child || two_children) {
      if (r.left <= i || r.left >= n)
        throw StructureError("left child index out of range");
      if (two_children && (r.right <= i || r.right >= n))
        throw StructureError("right child index out of range");
    }
    if (!dedup.emplace(r.kind, (r.left << kFieldBits) | r.right).second)
      throw StructureError("duplicate node record");
    recs[i] = r;
  }

  // Children follow parents, so one forward pass settles reachability.
  std::vector<char> reach(n, 0);
  reach[0] = 1;
  for (uint64_t i = 0; i < n; ++i) {
    if (!reach[i]) throw StructureError("unreachable node record");
    if (recs[i].kind >= 3) reach[recs[i].left] = 1;
    if (recs[i].kind >= 4) reach[recs[i].right] = 1;
  }

  std::set<uint64_t> ranks;
  for (uint64_t i = 0; i < n; ++i)
    if (recs[i].kind == 2) ranks.insert(recs[i].left);
  if (!ranks.empty() && (*ranks.begin() != 0 || *ranks.rbegin() != ranks.size() - 1))
    throw StructureError("atom ranks are not contiguous from zero");

  std::vector<Formula> out(n);
  for (uint64_t i = n; i-- > 0;) {
    const Rec& r = recs[i];
    switch (r.kind) {
      case 0:
        out[i] = prop::f_false();
        break;
      case 1:
        out[i] = prop::f_true();
        break;
      case 2:
        out[i] = prop::f_atom(prop::Atom::named(atom_base + r.left));
        break;
      case 3:
        out[i] = prop::f_not(out[r.left]);
        break;
      case 4:
        out[i] = prop::f_and(out[r.left], out[r.right]);
        break;
      case 5:
        out[i] = prop::f_or(out[r.left], out[r.right]);
        break;
      default:
        out[i] = prop::f_imp(out[r.left], out[r.right]);
        break;
    }
  }
  return out[0];
}

StringValue compute_eval_trace(Formula f, const prop::Assignment& a) {
  std::vector<Formula> order = encode_order(f);
  std::vector<bool> bits(order.size() + 1, false);
  for (size_t i = 0; i < order.size(); ++i) bits[i] = prop::eval_prop(order[i], a);
  bits[order.size()] = true;
  return StringValue::from_bits(std::move(bits));
}

namespace {

using sigma::f_all;
using sigma::f_and;
using sigma::f_and_all;
using sigma::f_eq;
using sigma::f_ex;
using sigma::f_iff;
using sigma::f_imp;
using sigma::f_in;
using sigma::f_leq;
using sigma::f_not;
using sigma::f_or;
using sigma::t_add;
using sigma::t_len;
using sigma::t_mul;
using sigma::t_num;
using sigma::t_var;

// Bit k of the value of t is set iff t lies in [(2q+1)2^k, (2q+2)2^k - 1]
// for some q; subtraction-free via t + 1 on the upper side.
FormulaPtr bit_set(uint64_t k, const TermPtr& t) {
  TermPtr pow = t_num(uint64_t{1} << k);
  TermPtr twoq = t_add(t_var("q"), t_var("q"));
  return f_ex("q", t,
              f_and(f_leq(t_mul(pow, t_add(twoq, t_num(1))), t),
                    f_leq(t_add(t, t_num(1)), t_mul(pow, t_add(twoq, t_num(2))))));
}

// The 4 kind bits of record i spell the constant c.
FormulaPtr kind_is(uint64_t c, const TermPtr& i20) {
  std::vector<FormulaPtr> lits;
  for (uint64_t b = 0; b < kKindBits; ++b) {
    FormulaPtr bit = f_in("Y", t_add(t_num(kHeaderBits + b), i20));
    lits.push_back((c >> b) & 1 ? bit : f_not(bit));
  }
  return f_and_all(std::move(lits));
}

// The 8-bit field of record i starting at in-record offset `shift` equals
// the value of the bound variable named v.
FormulaPtr field_eq(uint64_t shift, const TermPtr& i20, const std::string& v) {
  std::vector<FormulaPtr> eqs;
  for (uint64_t b = 0; b < kFieldBits; ++b)
    eqs.push_back(f_iff(f_in("Y", t_add(t_num(kHeaderBits + shift + b), i20)),
                        bit_set(b, t_var(v))));
  return f_and_all(std::move(eqs));
}

FormulaPtr build_eval() {
  TermPtr zlen = t_len("Z");
  TermPtr xlen = t_len("X");
  TermPtr i20 = t_mul(t_num(20), t_var("i"));
  FormulaPtr zi = f_in("Z", t_var("i"));

  // |Y| + 20 = 17 + 20|Z| ties the encoding length to the node count
  // (n nodes mean |Z| = n + 1 and |Y| = 17 + 20n), and |Z| >= 2 demands
  // at least one node.
  FormulaPtr len_eq = f_eq(t_add(t_len("Y"), t_num(20)),
                           t_add(t_num(17), t_mul(t_num(20), zlen)));
  FormulaPtr len_min = f_leq(t_num(2), zlen);

  // The 16 header bits of Y spell the node count m, pinned to |Z| - 1.
  std::vector<FormulaPtr> hdr;
  for (uint64_t h = 0; h < kHeaderBits; ++h)
    hdr.push_back(f_iff(f_in("Y", t_num(h)), bit_set(h, t_var("m"))));
  FormulaPtr header =
      f_ex("m", zlen, f_and(f_eq(t_add(t_var("m"), t_num(1)), zlen),
                            f_and_all(std::move(hdr))));

  // Guards keep every child reference inside the record range i+1..n-1;
  // they sit before the field comparison so evaluation can skip early.
  FormulaPtr guard_j = f_and(f_leq(t_add(t_var("i"), t_num(1)), t_var("j")),
                             f_leq(t_add(t_var("j"), t_num(2)), zlen));
  FormulaPtr guard_k = f_and(f_leq(t_add(t_var("i"), t_num(1)), t_var("k")),
                             f_leq(t_add(t_var("k"), t_num(2)), zlen));

  FormulaPtr local_false = f_not(zi);
  FormulaPtr local_true = zi;
  FormulaPtr local_atom =
      f_all("j", xlen,
            f_imp(f_leq(t_add(t_var("j"), t_num(2)), xlen),
                  f_imp(field_eq(kKindBits, i20, "j"),
                        f_iff(zi, f_in("X", t_var("j"))))));
  FormulaPtr local_not =
      f_all("j", zlen,
            f_imp(guard_j, f_imp(field_eq(kKindBits, i20, "j"),
                                 f_iff(zi, f_not(f_in("Z", t_var("j")))))));
  auto local_bin = [&](FormulaPtr sem) {
    return f_all(
        "j", zlen,
        f_imp(guard_j,
              f_imp(field_eq(kKindBits, i20, "j"),
                    f_all("k", zlen,
                          f_imp(guard_k,
                                f_imp(field_eq(kKindBits + kFieldBits, i20, "k"),
                                      f_iff(zi, sem)))))));
  };
  FormulaPtr zj = f_in("Z", t_var("j"));
  FormulaPtr zk = f_in("Z", t_var("k"));

  std::vector<FormulaPtr> kinds;
  kinds.push_back(f_imp(kind_is(0, i20), local_false));
  kinds.push_back(f_imp(kind_is(1, i20), local_true));
  kinds.push_back(f_imp(kind_is(2, i20), local_atom));
  kinds.push_back(f_imp(kind_is(3, i20), local_not));
  kinds.push_back(f_imp(kind_is(4, i20), local_bin(f_and(zj, zk))));
  kinds.push_back(f_imp(kind_is(5, i20), local_bin(f_or(zj, zk))));
  kinds.push_back(f_imp(kind_is(6, i20), local_bin(f_imp(zj, zk))));

  FormulaPtr nodes = f_all("i", zlen,
                           f_imp(f_leq(t_add(t_var("i"), t_num(2)), zlen),
                                 f_and_all(std::move(kinds))));

  return f_and_all({len_eq, len_min, header, nodes});
}

}  // namespace

FormulaPtr generate_eval() {
  static FormulaPtr eval = build_eval();
  return eval;
}

translate::LengthProfile eval_profile(uint64_t atom_count,
                                      uint64_t node_count) {
  if (node_count == 0) throw StructureError("a formula has at least one node");
  translate::LengthProfile prof;
  prof.lengths["X"] = atom_count + 1;
  prof.lengths["Y"] = kHeaderBits + kRecordBits * node_count + 1;
  prof.lengths["Z"] = node_count + 1;
  return prof;
}

StringValue assignment_bits(const std::vector<prop::Atom>& order,
                            const prop::Assignment& a) {
  std::vector<bool> bits(order.size() + 1, false);
  for (size_t j = 0; j < order.size(); ++j) {
    auto it = a.find(order[j]);
    if (it == a.end())
      throw EvalError("unassigned atom " + order[j].text());
    bits[j] = it->second;
  }
  bits[order.size()] = true;
  return StringValue::from_bits(std::move(bits));
}

std::map<prop::Atom, prop::Formula> bit_substitution(const std::string& var,
                                                     const StringValue& value) {
  std::map<prop::Atom, prop::Formula> sigma;
  for (uint64_t j = 0; j + 1 < value.length(); ++j)
    sigma.emplace(prop::Atom::string_bit(var, static_cast<uint32_t>(j)),
                  prop::f_const(value.bit(j)));
  return sigma;
}

std::map<prop::Atom, prop::Formula> xz_substitution(Formula f) {
  atom_ranks(f);  // validates the labels
  std::vector<prop::Atom> order = prop::atoms(f);
  std::vector<Formula> nodes = encode_order(f);
  std::map<prop::Atom, prop::Formula> sigma;
  for (uint32_t j = 0; j < order.size(); ++j)
    sigma.emplace(prop::Atom::string_bit("X", j), prop::f_atom(order[j]));
  for (uint32_t i = 0; i < nodes.size(); ++i)
    sigma.emplace(prop::Atom::string_bit("Z", i), nodes[i]);
  return sigma;
}

Formula eval_prime_formula(Formula f) {
  std::vector<Formula> order = encode_order(f);
  if (order.size() > kNodeCap)
    throw StructureError("formula exceeds the encoding node cap");
  translate::LengthProfile prof =
      eval_profile(prop::atoms(f).size(), order.size());
  Formula e = translate::translate(generate_eval(), prof);
  e = prop::substitute(e, bit_substitution("Y", encode_formula(f)));
  e = prop::fold_constants(e);
  return prop::substitute(e, xz_substitution(f));
}

proofs::Proof prove_eval_prime(Formula f) {
  Formula target = eval_prime_formula(f);
  prover::Derivation d;
  d.conclude(prover::prove_self_evident(d, target));
  return d.take();
}

}  // namespace reduct::evalenc
