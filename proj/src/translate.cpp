#include "reduct/translate.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <vector>

#include "reduct/errors.hpp"

namespace reduct::translate {

namespace {

bool valid_profile_name(std::string_view s, bool upper) {
  if (s.empty()) return false;
  if (upper ? !(s[0] >= 'A' && s[0] <= 'Z') : !(s[0] >= 'a' && s[0] <= 'z'))
    return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

void parse_profile_part(std::string_view part, bool upper,
                        std::map<std::string, uint64_t>* out) {
  size_t pos = 0;
  while (pos < part.size()) {
    size_t end = part.find(',', pos);
    if (end == std::string_view::npos) end = part.size();
    std::string_view item = part.substr(pos, end - pos);
    size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("profile entry needs '='", pos);
    std::string name(item.substr(0, eq));
    std::string_view num = item.substr(eq + 1);
    if (!valid_profile_name(name, upper))
      throw ParseError("bad profile variable '" + name + "'", pos);
    if (num.empty() ||
        !std::all_of(num.begin(), num.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError("bad profile number for '" + name + "'", pos);
    uint64_t v = 0;
    for (char c : num) {
      if (v > (UINT64_MAX - 9) / 10) throw ParseError("profile number overflow", pos);
      v = v * 10 + static_cast<uint64_t>(c - '0');
    }
    if (!out->emplace(name, v).second)
      throw ParseError("duplicate profile variable '" + name + "'", pos);
    pos = end + (end < part.size() ? 1 : 0);
  }
}

}  // namespace

LengthProfile LengthProfile::parse(std::string_view text) {
  LengthProfile p;
  size_t semi = text.find(';');
  std::string_view strs = text.substr(0, semi == std::string_view::npos ? text.size() : semi);
  parse_profile_part(strs, true, &p.lengths);
  if (semi != std::string_view::npos)
    parse_profile_part(text.substr(semi + 1), false, &p.numvals);
  return p;
}

std::string LengthProfile::text() const {
  std::string out;
  bool first = true;
  for (const auto& [name, n] : lengths) {
    if (!first) out += ',';
    first = false;
    out += name + "=" + std::to_string(n);
  }
  if (!numvals.empty()) {
    out += ';';
    first = true;
    for (const auto& [name, v] : numvals) {
      if (!first) out += ',';
      first = false;
      out += name + "=" + std::to_string(v);
    }
  }
  return out;
}

namespace {

using Frames = std::vector<std::pair<std::string_view, uint64_t>>;

uint64_t eval_term_at(const sigma::TermPtr& t, const LengthProfile& prof,
                      const Frames& frames) {
  switch (t->kind) {
    case sigma::Term::Kind::Zero: return 0;
    case sigma::Term::Kind::One: return 1;
    case sigma::Term::Kind::Var: {
      for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
        if (it->first == t->name) return it->second;
      }
      auto found = prof.numvals.find(t->name);
      if (found == prof.numvals.end())
        throw StructureError("number variable '" + t->name +
                             "' not covered by the profile");
      return found->second;
    }
    case sigma::Term::Kind::Add: {
      uint64_t a = eval_term_at(t->a, prof, frames);
      uint64_t b = eval_term_at(t->b, prof, frames);
      uint64_t r = 0;
      if (__builtin_add_overflow(a, b, &r)) throw EvalError("addition overflow");
      return r;
    }
    case sigma::Term::Kind::Mul: {
      uint64_t a = eval_term_at(t->a, prof, frames);
      uint64_t b = eval_term_at(t->b, prof, frames);
      uint64_t r = 0;
      if (__builtin_mul_overflow(a, b, &r)) throw EvalError("multiplication overflow");
      return r;
    }
    case sigma::Term::Kind::Len: {
      auto found = prof.lengths.find(t->name);
      if (found == prof.lengths.end())
        throw StructureError("string variable '" + t->name +
                             "' not covered by the profile");
      return found->second;
    }
  }
  throw StructureError("unknown term kind");
}

struct Translator {
  const LengthProfile& prof;
  bool fold;
  Frames frames;

  prop::Formula mk_not(prop::Formula a) {
    return fold ? prop::fold_step(prop::Op::Not, a, prop::Formula())
                : prop::f_not(a);
  }
  prop::Formula mk_bin(prop::Op op, prop::Formula a, prop::Formula b) {
    if (fold) return prop::fold_step(op, a, b);
    switch (op) {
      case prop::Op::And: return prop::f_and(a, b);
      case prop::Op::Or: return prop::f_or(a, b);
      default: return prop::f_imp(a, b);
    }
  }

  // Balanced combination over the full item list, mirroring the shape of
  // f_and_all / f_or_all so that the folded and unfolded routes agree.
  prop::Formula combine(prop::Op op, const std::vector<prop::Formula>& items,
                        size_t lo, size_t hi) {
    if (hi - lo == 1) return items[lo];
    size_t mid = lo + (hi - lo) / 2;
    return mk_bin(op, combine(op, items, lo, mid), combine(op, items, mid, hi));
  }

  prop::Formula go(const sigma::FormulaPtr& f) {
    using FormulaKind = sigma::Formula::Kind;
    switch (f->kind) {
      case FormulaKind::Eq: {
        uint64_t a = eval_term_at(f->t, prof, frames);
        uint64_t b = eval_term_at(f->u, prof, frames);
        return prop::f_const(a == b);
      }
      case FormulaKind::Leq: {
        uint64_t a = eval_term_at(f->t, prof, frames);
        uint64_t b = eval_term_at(f->u, prof, frames);
        return prop::f_const(a <= b);
      }
      case FormulaKind::In: {
        uint64_t j = eval_term_at(f->t, prof, frames);
        auto found = prof.lengths.find(f->var);
        if (found == prof.lengths.end())
          throw StructureError("string variable '" + f->var +
                               "' not covered by the profile");
        uint64_t n = found->second;
        if (n == 0 || j >= n) return prop::f_false();
        if (j == n - 1) return prop::f_true();
        return prop::f_atom(prop::Atom::string_bit(f->var, static_cast<uint32_t>(j)));
      }
      case FormulaKind::Not:
        return mk_not(go(f->f));
      case FormulaKind::And:
        return mk_bin(prop::Op::And, go(f->f), go(f->g));
      case FormulaKind::Or:
        return mk_bin(prop::Op::Or, go(f->f), go(f->g));
      case FormulaKind::Imp:
        return mk_bin(prop::Op::Imp, go(f->f), go(f->g));
      case FormulaKind::All:
      case FormulaKind::Ex: {
        bool universal = f->kind == FormulaKind::All;
        prop::Op op = universal ? prop::Op::And : prop::Op::Or;
        uint64_t bound = eval_term_at(f->t, prof, frames);
        if (bound > 10'000'000)
          throw CapExceeded("quantifier bound " + std::to_string(bound) +
                            " is too large to expand");
        std::vector<prop::Formula> items;
        items.reserve(bound + 1);
        frames.emplace_back(f->var, 0);
        for (uint64_t v = 0;; ++v) {
          frames.back().second = v;
          prop::Formula item = go(f->f);
          items.push_back(item);
          // A constant item absorbs the whole expansion once folding is on.
          if (fold && item == prop::f_const(!universal)) {
            frames.pop_back();
            return item;
          }
          if (v == bound) break;
        }
        frames.pop_back();
        return combine(op, items, 0, items.size());
      }
    }
    throw StructureError("unknown formula kind");
  }
};

}  // namespace

prop::Formula translate(const sigma::FormulaPtr& f, const LengthProfile& prof,
                        bool fold) {
  if (!f) throw StructureError("translate needs a formula");
  sigma::FreeVars fv = sigma::free_variables(f);
  for (const std::string& v : fv.nums) {
    if (prof.numvals.find(v) == prof.numvals.end())
      throw StructureError("number variable '" + v + "' not covered by the profile");
  }
  for (const std::string& v : fv.strs) {
    if (prof.lengths.find(v) == prof.lengths.end())
      throw StructureError("string variable '" + v + "' not covered by the profile");
  }
  Translator tr{prof, fold, {}};
  return tr.go(f);
}

prop::Assignment assignment_of_strings(
    const LengthProfile& prof,
    const std::map<std::string, StringValue>& values) {
  for (const auto& [name, v] : values) {
    if (prof.lengths.find(name) == prof.lengths.end())
      throw StructureError("value given for '" + name + "' which is not in the profile");
  }
  prop::Assignment a;
  for (const auto& [name, n] : prof.lengths) {
    auto found = values.find(name);
    if (found == values.end())
      throw StructureError("no value given for '" + name + "'");
    const StringValue& v = found->second;
    if (v.length() != n)
      throw StructureError("value of '" + name + "' has length " +
                           std::to_string(v.length()) + ", profile says " +
                           std::to_string(n));
    for (uint64_t j = 0; n >= 2 && j < n - 1; ++j)
      a[prop::Atom::string_bit(name, static_cast<uint32_t>(j))] = v.bit(j);
  }
  return a;
}

uint64_t string_space_bits(const LengthProfile& prof) {
  uint64_t bits = 0;
  for (const auto& [name, n] : prof.lengths) bits += n >= 1 ? n - 1 : 0;
  return bits;
}

namespace {

// Builds the tuple of strings for one point of the enumeration space.
std::map<std::string, StringValue> tuple_at(const LengthProfile& prof,
                                            uint64_t index) {
  std::map<std::string, StringValue> tuple;
  uint64_t offset = 0;
  for (const auto& [name, n] : prof.lengths) {
    std::vector<bool> bits;
    if (n >= 1) {
      bits.resize(n, false);
      for (uint64_t j = 0; j + 1 < n; ++j) bits[j] = (index >> (offset + j)) & 1u;
      bits[n - 1] = true;
      offset += n - 1;
    }
    tuple.emplace(name, StringValue::from_bits(bits));
  }
  return tuple;
}

bool eval_tuple(const sigma::FormulaPtr& f, const LengthProfile& prof,
                uint64_t index) {
  sigma::Environment env;
  env.numvals = prof.numvals;
  env.strvals = tuple_at(prof, index);
  return sigma::eval_formula(f, env);
}

}  // namespace

bool holds_for_all_strings(const sigma::FormulaPtr& f,
                           const LengthProfile& prof,
                           std::map<std::string, StringValue>* witness,
                           bool parallel) {
  uint64_t bits = string_space_bits(prof);
  if (bits > 40)
    throw CapExceeded("string space has " + std::to_string(bits) +
                      " free bits, enumeration cap is 40");
  const uint64_t total = uint64_t{1} << bits;
  uint64_t found = UINT64_MAX;

  if (!parallel) {
    for (uint64_t i = 0; i < total; ++i) {
      if (!eval_tuple(f, prof, i)) {
        found = i;
        break;
      }
    }
  } else {
    constexpr uint64_t kChunk = 256;
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
        if (!eval_tuple(f, prof, i)) {
          uint64_t cur = best.load(std::memory_order_relaxed);
          while (i < cur && !best.compare_exchange_weak(cur, i, std::memory_order_relaxed)) {
          }
          break;
        }
      }
    }
    found = best.load();
  }

  if (found == UINT64_MAX) return true;
  if (witness != nullptr) *witness = tuple_at(prof, found);
  return false;
}

}  // namespace reduct::translate
