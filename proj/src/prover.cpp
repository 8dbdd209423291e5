#include "reduct/prover.hpp"

#include "reduct/errors.hpp"

namespace reduct::prover {

using prop::f_and;
using prop::f_false;
using prop::f_imp;
using prop::f_not;
using prop::f_or;
using prop::f_true;
using prop::Formula;

Derivation::Derivation(std::vector<prop::Formula> premises,
                       std::vector<prop::Formula> imports)
    : imports_(std::move(imports)) {
  proof_.premises = std::move(premises);
}

uint64_t Derivation::append(Formula f, proofs::Rule rule) {
  if (!f) throw StructureError("cannot append an empty formula");
  uint64_t sz = f.symbol_size();
  if (rule.kind == proofs::Rule::Kind::Sub) {
    for (const auto& [atom, img] : rule.sigma) {
      (void)atom;
      sz += 1 + img.symbol_size();
    }
  }
  size_ += sz;
  proof_.lines.push_back(proofs::ProofLine{next_id_, f, std::move(rule)});
  by_id_.push_back(f);
  return next_id_++;
}

uint64_t Derivation::axiom(const std::string& schema, Formula instance) {
  if (!proofs::is_schema_instance(schema, instance))
    throw StructureError("not an instance of schema " + schema);
  proofs::Rule r;
  r.kind = proofs::Rule::Kind::Axiom;
  r.schema = schema;
  return append(instance, std::move(r));
}

uint64_t Derivation::mp(uint64_t antecedent, uint64_t implication) {
  Formula a = formula(antecedent);
  Formula ab = formula(implication);
  if (ab.op() != prop::Op::Imp || ab.left() != a)
    throw StructureError("modus ponens shape mismatch");
  proofs::Rule r;
  r.kind = proofs::Rule::Kind::Mp;
  r.i = antecedent;
  r.j = implication;
  return append(ab.right(), std::move(r));
}

uint64_t Derivation::sub(uint64_t source,
                         const std::map<prop::Atom, Formula>& sigma) {
  Formula f = prop::substitute(formula(source), sigma);
  proofs::Rule r;
  r.kind = proofs::Rule::Kind::Sub;
  r.i = source;
  r.sigma = sigma;
  return append(f, std::move(r));
}

uint64_t Derivation::premise(uint64_t k) {
  if (k >= proof_.premises.size()) throw StructureError("premise index out of range");
  proofs::Rule r;
  r.kind = proofs::Rule::Kind::Premise;
  r.k = k;
  return append(proof_.premises[k], std::move(r));
}

uint64_t Derivation::import_line(uint64_t k) {
  if (k >= imports_.size()) throw StructureError("import index out of range");
  proofs::Rule r;
  r.kind = proofs::Rule::Kind::Import;
  r.k = k;
  return append(imports_[k], std::move(r));
}

void Derivation::mark(const std::string& text) {
  proof_.comments.emplace_back(proof_.lines.size(), text);
}

Formula Derivation::formula(uint64_t id) const {
  if (id == 0 || id >= next_id_) throw StructureError("unknown line id");
  return by_id_[id - 1];
}

uint64_t Derivation::truth_line() {
  if (truth_ == 0) truth_ = axiom("truth", f_true());
  return truth_;
}

uint64_t Derivation::nonfalsity_line() {
  if (nonfalsity_ == 0) nonfalsity_ = axiom("nonfalsity", f_not(f_false()));
  return nonfalsity_;
}

uint64_t Derivation::identity(Formula c) {
  auto it = identity_memo_.find(c.node());
  if (it != identity_memo_.end()) return it->second;
  Formula cc = f_imp(c, c);
  uint64_t s = axiom("s", f_imp(f_imp(c, f_imp(cc, c)), f_imp(f_imp(c, cc), cc)));
  uint64_t k1 = axiom("k", f_imp(c, f_imp(cc, c)));
  uint64_t m1 = mp(k1, s);
  uint64_t k2 = axiom("k", f_imp(c, cc));
  uint64_t out = mp(k2, m1);
  identity_memo_.emplace(c.node(), out);
  return out;
}

uint64_t Derivation::weaken(uint64_t y, Formula x) {
  Formula fy = formula(y);
  uint64_t k = axiom("k", f_imp(fy, f_imp(x, fy)));
  return mp(y, k);
}

uint64_t Derivation::syl(uint64_t ab, uint64_t bc) {
  Formula fab = formula(ab);
  Formula fbc = formula(bc);
  if (fab.op() != prop::Op::Imp || fbc.op() != prop::Op::Imp ||
      fab.right() != fbc.left())
    throw StructureError("syllogism shape mismatch");
  Formula a = fab.left(), b = fab.right(), c = fbc.right();
  uint64_t t = weaken(bc, a);  // A > (B > C)
  uint64_t s = axiom("s", f_imp(f_imp(a, f_imp(b, c)),
                                f_imp(f_imp(a, b), f_imp(a, c))));
  uint64_t u = mp(t, s);  // (A>B) > (A>C)
  return mp(ab, u);
}

uint64_t Derivation::prefix_imp(uint64_t bc, Formula a) {
  Formula fbc = formula(bc);
  if (fbc.op() != prop::Op::Imp) throw StructureError("prefix needs an implication");
  Formula b = fbc.left(), c = fbc.right();
  uint64_t t = weaken(bc, a);  // A > (B > C)
  uint64_t s = axiom("s", f_imp(f_imp(a, f_imp(b, c)),
                                f_imp(f_imp(a, b), f_imp(a, c))));
  return mp(t, s);  // (A>B) > (A>C)
}

uint64_t Derivation::suffix_imp(uint64_t a2a, Formula b) {
  Formula f = formula(a2a);
  if (f.op() != prop::Op::Imp) throw StructureError("suffix needs an implication");
  Formula a2 = f.left(), a = f.right();
  Formula ab = f_imp(a, b);
  // (A>B) > (A2>(A>B)) > ... > (A>B) > ((A2>A)>(A2>B)), then apply A2>A.
  uint64_t s1 = axiom("s", f_imp(f_imp(a2, f_imp(a, b)),
                                 f_imp(f_imp(a2, a), f_imp(a2, b))));
  uint64_t k1 = axiom("k", f_imp(ab, f_imp(a2, ab)));
  uint64_t c = syl(k1, s1);  // (A>B) > ((A2>A)>(A2>B))
  return apply_under(c, a2a);
}

uint64_t Derivation::apply_under(uint64_t xyz, uint64_t y) {
  Formula f = formula(xyz);
  if (f.op() != prop::Op::Imp || f.right().op() != prop::Op::Imp ||
      f.right().left() != formula(y))
    throw StructureError("apply_under shape mismatch");
  Formula x = f.left(), fy = f.right().left(), z = f.right().right();
  uint64_t s = axiom("s", f_imp(f_imp(x, f_imp(fy, z)),
                                f_imp(f_imp(x, fy), f_imp(x, z))));
  uint64_t u = mp(xyz, s);     // (X>Y) > (X>Z)
  uint64_t w = weaken(y, x);   // X > Y
  return mp(w, u);
}

uint64_t Derivation::flip(uint64_t abc) {
  Formula f = formula(abc);
  if (f.op() != prop::Op::Imp || f.right().op() != prop::Op::Imp)
    throw StructureError("flip needs a nested implication");
  Formula a = f.left(), b = f.right().left(), c = f.right().right();
  uint64_t s = axiom("s", f_imp(f_imp(a, f_imp(b, c)),
                                f_imp(f_imp(a, b), f_imp(a, c))));
  uint64_t u = mp(abc, s);  // (A>B) > (A>C)
  uint64_t k = axiom("k", f_imp(b, f_imp(a, b)));
  return syl(k, u);  // B > (A>C)
}

uint64_t Derivation::combine_imp_and(uint64_t xy, uint64_t xz) {
  Formula fxy = formula(xy);
  Formula fxz = formula(xz);
  if (fxy.op() != prop::Op::Imp || fxz.op() != prop::Op::Imp ||
      fxy.left() != fxz.left())
    throw StructureError("combine_imp_and shape mismatch");
  Formula x = fxy.left(), y = fxy.right(), z = fxz.right();
  uint64_t ai = axiom("and-i", f_imp(y, f_imp(z, f_and(y, z))));
  uint64_t t = syl(xy, ai);  // X > (Z > (Y&Z))
  uint64_t s = axiom("s", f_imp(f_imp(x, f_imp(z, f_and(y, z))),
                                f_imp(f_imp(x, z), f_imp(x, f_and(y, z)))));
  uint64_t u = mp(t, s);
  return mp(xz, u);
}

uint64_t Derivation::from_false(Formula b) {
  uint64_t e = axiom("efq", f_imp(f_false(), f_imp(f_not(f_false()), b)));
  return apply_under(e, nonfalsity_line());
}

uint64_t Derivation::ex_falso_imp(uint64_t not_a, Formula b) {
  Formula na = formula(not_a);
  if (na.op() != prop::Op::Not) throw StructureError("ex_falso_imp needs a negation");
  Formula a = na.left();
  uint64_t e = axiom("efq", f_imp(a, f_imp(na, b)));
  return mp(not_a, flip(e));
}

uint64_t Derivation::dni(uint64_t a) {
  Formula fa = formula(a);
  Formula na = f_not(fa);
  uint64_t ni = axiom("neg-i", f_imp(f_imp(na, fa),
                                     f_imp(f_imp(na, na), f_not(na))));
  uint64_t w = weaken(a, na);  // ~A > A
  uint64_t t = mp(w, ni);      // (~A > ~A) > ~~A
  return mp(identity(na), t);
}

uint64_t Derivation::not_cong(uint64_t a2a) {
  Formula f = formula(a2a);
  if (f.op() != prop::Op::Imp) throw StructureError("not_cong needs an implication");
  Formula a2 = f.left(), a = f.right();
  uint64_t ni = axiom("neg-i", f_imp(f_imp(a2, a),
                                     f_imp(f_imp(a2, f_not(a)), f_not(a2))));
  uint64_t t = mp(a2a, ni);  // (A2>~A) > ~A2
  uint64_t k = axiom("k", f_imp(f_not(a), f_imp(a2, f_not(a))));
  return syl(k, t);  // ~A > ~A2
}

uint64_t Derivation::conclude(uint64_t id) {
  if (id == last_id()) return id;
  return mp(id, identity(formula(id)));
}

proofs::Proof Derivation::take() { return std::move(proof_); }

// --- constant-fold equivalences -------------------------------------------

bool EquivEngine::value_of(Formula f) {
  const std::optional<bool> v = prop::const_value(fold_of(f));
  if (!v.has_value())
    throw StructureError("formula does not fold to a constant");
  return *v;
}

uint64_t EquivEngine::value_line(Formula f) {
  auto it = value_lines_.find(f.node());
  if (it != value_lines_.end()) return it->second;
  // The fold rules are local, so a constant fold pins down enough child
  // folds for each case below: a true conjunction has two true-folding
  // children, a false conjunction at least one false-folding child, and so
  // on.  Every recursive call stays inside the fold-to-a-constant domain.
  bool v = value_of(f);
  uint64_t out = 0;
  switch (f.op()) {
    case prop::Op::True:
      out = d_.truth_line();
      break;
    case prop::Op::False:
      out = d_.nonfalsity_line();
      break;
    case prop::Op::Atom:
      throw StructureError("formula does not fold to a constant");
    case prop::Op::Not: {
      if (v) {
        // ~A with A false: the proof of ~A is the refutation of A.
        out = value_line(f.left());
      } else {
        out = d_.dni(value_line(f.left()));
      }
      break;
    }
    case prop::Op::And: {
      Formula a = f.left(), b = f.right();
      if (v) {
        uint64_t ai = d_.axiom("and-i", f_imp(a, f_imp(b, f)));
        out = d_.mp(value_line(b), d_.mp(value_line(a), ai));
      } else if (fold_of(a) == f_false()) {
        uint64_t e1 = d_.axiom("and-e1", f_imp(f, a));
        uint64_t ni = d_.axiom("neg-i", f_imp(f_imp(f, a),
                                              f_imp(f_imp(f, f_not(a)), f_not(f))));
        uint64_t t = d_.mp(e1, ni);
        uint64_t w = d_.weaken(value_line(a), f);  // (A&B) > ~A
        out = d_.mp(w, t);
      } else {
        uint64_t e2 = d_.axiom("and-e2", f_imp(f, b));
        uint64_t ni = d_.axiom("neg-i", f_imp(f_imp(f, b),
                                              f_imp(f_imp(f, f_not(b)), f_not(f))));
        uint64_t t = d_.mp(e2, ni);
        uint64_t w = d_.weaken(value_line(b), f);
        out = d_.mp(w, t);
      }
      break;
    }
    case prop::Op::Or: {
      Formula a = f.left(), b = f.right();
      if (v) {
        if (fold_of(a) == f_true()) {
          uint64_t i1 = d_.axiom("or-i1", f_imp(a, f));
          out = d_.mp(value_line(a), i1);
        } else {
          uint64_t i2 = d_.axiom("or-i2", f_imp(b, f));
          out = d_.mp(value_line(b), i2);
        }
      } else {
        Formula bot = f_false();
        uint64_t oe = d_.axiom("or-e", f_imp(f_imp(a, bot),
                                             f_imp(f_imp(b, bot), f_imp(f, bot))));
        uint64_t af = d_.ex_falso_imp(value_line(a), bot);
        uint64_t bf = d_.ex_falso_imp(value_line(b), bot);
        uint64_t u = d_.mp(bf, d_.mp(af, oe));  // (A|B) > F
        uint64_t ni = d_.axiom("neg-i", f_imp(f_imp(f, bot),
                                              f_imp(f_imp(f, f_not(bot)), f_not(f))));
        uint64_t t = d_.mp(u, ni);
        uint64_t w = d_.weaken(d_.nonfalsity_line(), f);
        out = d_.mp(w, t);
      }
      break;
    }
    case prop::Op::Imp: {
      Formula a = f.left(), b = f.right();
      if (v) {
        if (fold_of(b) == f_true()) {
          out = d_.weaken(value_line(b), a);
        } else {
          out = d_.ex_falso_imp(value_line(a), b);
        }
      } else {
        // A true, B false: refute A > B.
        uint64_t ib = d_.apply_under(d_.identity(f), value_line(a));  // (A>B) > B
        uint64_t ni = d_.axiom("neg-i", f_imp(f_imp(f, b),
                                              f_imp(f_imp(f, f_not(b)), f_not(f))));
        uint64_t t = d_.mp(ib, ni);
        uint64_t w = d_.weaken(value_line(b), f);  // (A>B) > ~B
        out = d_.mp(w, t);
      }
      break;
    }
  }
  value_lines_.emplace(f.node(), out);
  return out;
}

Formula EquivEngine::fold_of(Formula f) {
  // Same result as prop::fold_constants, but memoised across the whole
  // engine so repeated queries on shared subgraphs stay linear.
  auto it = folds_.find(f.node());
  if (it != folds_.end()) return it->second;
  Formula out;
  switch (f.op()) {
    case prop::Op::False:
    case prop::Op::True:
    case prop::Op::Atom:
      out = f;
      break;
    case prop::Op::Not:
      out = prop::fold_step(prop::Op::Not, fold_of(f.left()), Formula());
      break;
    default:
      out = prop::fold_step(f.op(), fold_of(f.left()), fold_of(f.right()));
      break;
  }
  folds_.emplace(f.node(), out);
  return out;
}

uint64_t EquivEngine::rewrite_fwd(prop::Op op, Formula a, Formula b) {
  // One fold_step rewrite at the root, as the implication from the
  // unrewritten form.  The branch order mirrors fold_step exactly.
  switch (op) {
    case prop::Op::And: {
      Formula n = f_and(a, b);
      if (a == f_true()) return d_.axiom("and-e2", f_imp(n, b));
      if (b == f_true()) return d_.axiom("and-e1", f_imp(n, a));
      if (a == f_false()) return d_.axiom("and-e1", f_imp(n, a));
      return d_.axiom("and-e2", f_imp(n, b));
    }
    case prop::Op::Or: {
      Formula n = f_or(a, b);
      if (a == f_true() || b == f_true()) {
        uint64_t k = d_.axiom("k", f_imp(f_true(), f_imp(n, f_true())));
        return d_.mp(d_.truth_line(), k);
      }
      if (a == f_false()) {
        uint64_t oe = d_.axiom("or-e", f_imp(f_imp(a, b), f_imp(f_imp(b, b), f_imp(n, b))));
        uint64_t t = d_.mp(d_.from_false(b), oe);
        return d_.mp(d_.identity(b), t);
      }
      uint64_t oe = d_.axiom("or-e", f_imp(f_imp(a, a), f_imp(f_imp(b, a), f_imp(n, a))));
      uint64_t t = d_.mp(d_.identity(a), oe);
      return d_.mp(d_.from_false(a), t);
    }
    case prop::Op::Imp: {
      Formula n = f_imp(a, b);
      if (a == f_false() || b == f_true()) {
        uint64_t k = d_.axiom("k", f_imp(f_true(), f_imp(n, f_true())));
        return d_.mp(d_.truth_line(), k);
      }
      if (a == f_true())
        return d_.apply_under(d_.identity(n), d_.truth_line());  // (T>B) > B
      // b == F: (A>F) rewrites to ~A.
      uint64_t ni = d_.axiom("neg-i", f_imp(f_imp(a, b),
                                            f_imp(f_imp(a, f_not(b)), f_not(a))));
      uint64_t v = d_.weaken(d_.nonfalsity_line(), a);  // A > ~F
      return d_.mp(v, d_.flip(ni));                     // (A>F) > ~A
    }
    case prop::Op::Not:
      // Closed cases only; handled through value_line instead.
      throw StructureError("negation rewrite is closed");
    default:
      throw StructureError("rewrite needs a connective");
  }
}

uint64_t EquivEngine::rewrite_bwd(prop::Op op, Formula a, Formula b) {
  switch (op) {
    case prop::Op::And: {
      Formula n = f_and(a, b);
      if (a == f_true())
        return d_.mp(d_.truth_line(), d_.axiom("and-i", f_imp(a, f_imp(b, n))));
      if (b == f_true()) {
        uint64_t ai = d_.axiom("and-i", f_imp(a, f_imp(b, n)));
        return d_.mp(d_.truth_line(), d_.flip(ai));
      }
      return d_.from_false(n);
    }
    case prop::Op::Or: {
      Formula n = f_or(a, b);
      if (a == f_true()) return d_.axiom("or-i1", f_imp(a, n));
      if (b == f_true()) return d_.axiom("or-i2", f_imp(b, n));
      if (a == f_false()) return d_.axiom("or-i2", f_imp(b, n));
      return d_.axiom("or-i1", f_imp(a, n));
    }
    case prop::Op::Imp: {
      Formula n = f_imp(a, b);
      if (a == f_false()) return d_.weaken(d_.from_false(b), f_true());
      if (b == f_true()) return d_.axiom("k", f_imp(f_true(), n));  // T > (A>T)
      if (a == f_true()) return d_.axiom("k", f_imp(b, n));         // B > (T>B)
      // b == F: ~A gives back A > F.
      uint64_t e = d_.axiom("efq", f_imp(a, f_imp(f_not(a), b)));
      return d_.flip(e);
    }
    case prop::Op::Not:
      throw StructureError("negation rewrite is closed");
    default:
      throw StructureError("rewrite needs a connective");
  }
}

uint64_t EquivEngine::equiv_fwd(Formula f) {
  auto it = fwd_.find(f.node());
  if (it != fwd_.end()) return it->second;

  Formula folded = fold_of(f);
  uint64_t out = 0;

  if (folded == f) {
    out = d_.identity(f);
  } else if (folded == f_true()) {
    // f > T needs no proof of f itself.
    uint64_t k = d_.axiom("k", f_imp(f_true(), f_imp(f, f_true())));
    out = d_.mp(d_.truth_line(), k);
  } else if (folded == f_false()) {
    out = d_.ex_falso_imp(value_line(f), f_false());  // f > F
  } else if (f.op() == prop::Op::Not) {
    // Child changed but stayed open, so no rewrite fires at this root.
    out = d_.not_cong(equiv_bwd(f.left()));
  } else {
    Formula a = f.left(), b = f.right();
    Formula a2 = fold_of(a), b2 = fold_of(b);
    Formula mid;
    uint64_t cong = 0;
    switch (f.op()) {
      case prop::Op::And: {
        mid = f_and(a2, b2);
        uint64_t e1 = d_.axiom("and-e1", f_imp(f, a));
        uint64_t e2 = d_.axiom("and-e2", f_imp(f, b));
        cong = d_.combine_imp_and(d_.syl(e1, equiv_fwd(a)), d_.syl(e2, equiv_fwd(b)));
        break;
      }
      case prop::Op::Or: {
        mid = f_or(a2, b2);
        uint64_t oe = d_.axiom("or-e", f_imp(f_imp(a, mid),
                                             f_imp(f_imp(b, mid), f_imp(f, mid))));
        uint64_t c1 = d_.syl(equiv_fwd(a), d_.axiom("or-i1", f_imp(a2, mid)));
        uint64_t c2 = d_.syl(equiv_fwd(b), d_.axiom("or-i2", f_imp(b2, mid)));
        cong = d_.mp(c2, d_.mp(c1, oe));
        break;
      }
      case prop::Op::Imp: {
        mid = f_imp(a2, b2);
        cong = d_.syl(d_.suffix_imp(equiv_bwd(a), b), d_.prefix_imp(equiv_fwd(b), a2));
        break;
      }
      default:
        throw StructureError("unexpected connective");
    }
    out = folded == mid ? cong : d_.syl(cong, rewrite_fwd(f.op(), a2, b2));
  }

  fwd_.emplace(f.node(), out);
  return out;
}

uint64_t EquivEngine::equiv_bwd(Formula f) {
  auto it = bwd_.find(f.node());
  if (it != bwd_.end()) return it->second;

  Formula folded = fold_of(f);
  uint64_t out = 0;

  if (folded == f) {
    out = d_.identity(f);
  } else if (folded == f_true()) {
    out = d_.weaken(value_line(f), f_true());  // T > f
  } else if (folded == f_false()) {
    // F > f needs no refutation of f itself.
    out = d_.from_false(f);
  } else if (f.op() == prop::Op::Not) {
    out = d_.not_cong(equiv_fwd(f.left()));
  } else {
    Formula a = f.left(), b = f.right();
    Formula a2 = fold_of(a), b2 = fold_of(b);
    Formula mid;
    uint64_t cong = 0;
    switch (f.op()) {
      case prop::Op::And: {
        mid = f_and(a2, b2);
        uint64_t e1m = d_.axiom("and-e1", f_imp(mid, a2));
        uint64_t e2m = d_.axiom("and-e2", f_imp(mid, b2));
        cong = d_.combine_imp_and(d_.syl(e1m, equiv_bwd(a)), d_.syl(e2m, equiv_bwd(b)));
        break;
      }
      case prop::Op::Or: {
        mid = f_or(a2, b2);
        uint64_t oem = d_.axiom("or-e", f_imp(f_imp(a2, f),
                                              f_imp(f_imp(b2, f), f_imp(mid, f))));
        uint64_t c1m = d_.syl(equiv_bwd(a), d_.axiom("or-i1", f_imp(a, f)));
        uint64_t c2m = d_.syl(equiv_bwd(b), d_.axiom("or-i2", f_imp(b, f)));
        cong = d_.mp(c2m, d_.mp(c1m, oem));
        break;
      }
      case prop::Op::Imp: {
        mid = f_imp(a2, b2);
        cong = d_.syl(d_.suffix_imp(equiv_fwd(a), b2), d_.prefix_imp(equiv_bwd(b), a));
        break;
      }
      default:
        throw StructureError("unexpected connective");
    }
    out = folded == mid ? cong : d_.syl(rewrite_bwd(f.op(), a2, b2), cong);
  }

  bwd_.emplace(f.node(), out);
  return out;
}

std::pair<uint64_t, uint64_t> EquivEngine::equiv_lines(Formula f) {
  return {equiv_fwd(f), equiv_bwd(f)};
}

proofs::Proof prove_closed(Formula f) {
  if (!f) throw StructureError("prove_closed needs a formula");
  Formula folded = prop::fold_constants(f);
  if (folded == f_false()) throw StructureError("formula folds to false");
  if (folded != f_true()) throw StructureError("formula does not fold to true");
  Derivation d;
  EquivEngine eng(d);
  d.conclude(eng.value_line(f));
  return d.take();
}

std::pair<proofs::Proof, proofs::Proof> prove_equiv_chain(Formula a, Formula b) {
  if (!a || !b) throw StructureError("prove_equiv_chain needs formulas");
  if (b != a && b != prop::fold_constants(a))
    throw StructureError("second formula is not the constant fold of the first");
  proofs::Proof fwd_proof, bwd_proof;
  {
    Derivation d;
    EquivEngine eng(d);
    if (b == a && prop::fold_constants(a) != a) {
      d.conclude(d.identity(a));  // A > A both ways
    } else {
      d.conclude(eng.equiv_fwd(a));
    }
    fwd_proof = d.take();
  }
  {
    Derivation d;
    EquivEngine eng(d);
    if (b == a && prop::fold_constants(a) != a) {
      d.conclude(d.identity(a));
    } else {
      d.conclude(eng.equiv_bwd(a));
    }
    bwd_proof = d.take();
  }
  return {std::move(fwd_proof), std::move(bwd_proof)};
}

uint64_t prove_self_evident(Derivation& d, Formula f) {
  if (!f) throw StructureError("prove_self_evident needs a formula");
  switch (f.op()) {
    case prop::Op::True:
      return d.truth_line();
    case prop::Op::Not:
      if (f.left() == f_false()) return d.nonfalsity_line();
      break;
    case prop::Op::Imp:
      if (f.left() == f.right()) return d.identity(f.left());
      break;
    case prop::Op::And: {
      uint64_t l = prove_self_evident(d, f.left());
      uint64_t r = prove_self_evident(d, f.right());
      uint64_t ai = d.axiom("and-i", f_imp(f.left(), f_imp(f.right(), f)));
      return d.mp(r, d.mp(l, ai));
    }
    default:
      break;
  }
  throw StructureError("formula is not of the self-evident shapes");
}

}  // namespace reduct::prover
