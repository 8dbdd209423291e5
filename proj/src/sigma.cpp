#include "reduct/sigma.hpp"

#include <algorithm>
#include <cctype>

#include "reduct/errors.hpp"

namespace reduct::sigma {

namespace {

TermPtr mk_term(Term::Kind k, std::string name, TermPtr a, TermPtr b) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->name = std::move(name);
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

void collect_term_vars(const TermPtr& t, std::set<std::string>& nums,
                       std::set<std::string>& strs) {
  switch (t->kind) {
    case Term::Kind::Zero:
    case Term::Kind::One:
      return;
    case Term::Kind::Var:
      nums.insert(t->name);
      return;
    case Term::Kind::Len:
      strs.insert(t->name);
      return;
    case Term::Kind::Add:
    case Term::Kind::Mul:
      collect_term_vars(t->a, nums, strs);
      collect_term_vars(t->b, nums, strs);
      return;
  }
}

bool term_mentions(const TermPtr& t, const std::string& var) {
  switch (t->kind) {
    case Term::Kind::Zero:
    case Term::Kind::One:
    case Term::Kind::Len:
      return false;
    case Term::Kind::Var:
      return t->name == var;
    case Term::Kind::Add:
    case Term::Kind::Mul:
      return term_mentions(t->a, var) || term_mentions(t->b, var);
  }
  return false;
}

std::shared_ptr<Formula> mk_formula(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

}  // namespace

TermPtr t_zero() { return mk_term(Term::Kind::Zero, "", nullptr, nullptr); }
TermPtr t_one() { return mk_term(Term::Kind::One, "", nullptr, nullptr); }

TermPtr t_var(std::string name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
    throw StructureError("number variable must start with a lowercase letter: " + name);
  return mk_term(Term::Kind::Var, std::move(name), nullptr, nullptr);
}

TermPtr t_add(TermPtr l, TermPtr r) {
  return mk_term(Term::Kind::Add, "", std::move(l), std::move(r));
}

TermPtr t_mul(TermPtr l, TermPtr r) {
  return mk_term(Term::Kind::Mul, "", std::move(l), std::move(r));
}

TermPtr t_len(std::string strvar) {
  if (strvar.empty() || !std::isupper(static_cast<unsigned char>(strvar[0])))
    throw StructureError("string variable must start with an uppercase letter: " + strvar);
  return mk_term(Term::Kind::Len, std::move(strvar), nullptr, nullptr);
}

TermPtr t_num(uint64_t n) {
  if (n == 0) return t_zero();
  if (n == 1) return t_one();
  if (n % 2 == 0) {
    auto h = t_num(n / 2);
    return t_mul(t_add(t_one(), t_one()), h);
  }
  return t_add(t_num(n - 1), t_one());
}

FormulaPtr f_eq(TermPtr t, TermPtr u) {
  auto f = mk_formula(Formula::Kind::Eq);
  f->t = std::move(t);
  f->u = std::move(u);
  return f;
}

FormulaPtr f_leq(TermPtr t, TermPtr u) {
  auto f = mk_formula(Formula::Kind::Leq);
  f->t = std::move(t);
  f->u = std::move(u);
  return f;
}

FormulaPtr f_in(std::string strvar, TermPtr t) {
  if (strvar.empty() || !std::isupper(static_cast<unsigned char>(strvar[0])))
    throw StructureError("string variable must start with an uppercase letter: " + strvar);
  auto f = mk_formula(Formula::Kind::In);
  f->var = std::move(strvar);
  f->t = std::move(t);
  return f;
}

FormulaPtr f_not(FormulaPtr g) {
  auto f = mk_formula(Formula::Kind::Not);
  f->f = std::move(g);
  return f;
}

namespace {
FormulaPtr binary(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = mk_formula(k);
  f->f = std::move(a);
  f->g = std::move(b);
  return f;
}

FormulaPtr quantifier(Formula::Kind k, std::string var, TermPtr bound, FormulaPtr body) {
  if (var.empty() || !std::islower(static_cast<unsigned char>(var[0])))
    throw StructureError("quantified variable must be a number variable: " + var);
  if (term_mentions(bound, var))
    throw StructureError("quantifier bound mentions the quantified variable " + var);
  auto f = mk_formula(k);
  f->var = std::move(var);
  f->t = std::move(bound);
  f->f = std::move(body);
  return f;
}
}  // namespace

FormulaPtr f_and(FormulaPtr f, FormulaPtr g) { return binary(Formula::Kind::And, std::move(f), std::move(g)); }
FormulaPtr f_or(FormulaPtr f, FormulaPtr g) { return binary(Formula::Kind::Or, std::move(f), std::move(g)); }
FormulaPtr f_imp(FormulaPtr f, FormulaPtr g) { return binary(Formula::Kind::Imp, std::move(f), std::move(g)); }

FormulaPtr f_all(std::string var, TermPtr bound, FormulaPtr body) {
  return quantifier(Formula::Kind::All, std::move(var), std::move(bound), std::move(body));
}

FormulaPtr f_ex(std::string var, TermPtr bound, FormulaPtr body) {
  return quantifier(Formula::Kind::Ex, std::move(var), std::move(bound), std::move(body));
}

namespace {
FormulaPtr balanced(std::vector<FormulaPtr>& fs, size_t lo, size_t hi,
                    FormulaPtr (*join)(FormulaPtr, FormulaPtr)) {
  if (hi - lo == 1) return fs[lo];
  size_t mid = lo + (hi - lo) / 2;
  return join(balanced(fs, lo, mid, join), balanced(fs, mid, hi, join));
}
}  // namespace

FormulaPtr f_and_all(std::vector<FormulaPtr> fs) {
  if (fs.empty()) throw StructureError("empty conjunction");
  return balanced(fs, 0, fs.size(), f_and);
}

FormulaPtr f_or_all(std::vector<FormulaPtr> fs) {
  if (fs.empty()) throw StructureError("empty disjunction");
  return balanced(fs, 0, fs.size(), f_or);
}

FormulaPtr f_iff(FormulaPtr f, FormulaPtr g) {
  return f_and(f_imp(f, g), f_imp(g, f));
}

namespace {

struct EvalCtx {
  const Environment& env;
  // Quantifier frames, innermost last. Variable counts are tiny so a linear
  // scan beats a map here.
  std::vector<std::pair<std::string_view, uint64_t>> frames;

  uint64_t num(const std::string& name) const {
    for (auto it = frames.rbegin(); it != frames.rend(); ++it)
      if (it->first == name) return it->second;
    auto it = env.numvals.find(name);
    if (it == env.numvals.end()) throw EvalError("unbound number variable " + name);
    return it->second;
  }

  const StringValue& str(const std::string& name) const {
    auto it = env.strvals.find(name);
    if (it == env.strvals.end()) throw EvalError("unbound string variable " + name);
    return it->second;
  }
};

uint64_t eval_t(const TermPtr& t, const EvalCtx& ctx) {
  switch (t->kind) {
    case Term::Kind::Zero:
      return 0;
    case Term::Kind::One:
      return 1;
    case Term::Kind::Var:
      return ctx.num(t->name);
    case Term::Kind::Len:
      return ctx.str(t->name).length();
    case Term::Kind::Add: {
      uint64_t l = eval_t(t->a, ctx), r = eval_t(t->b, ctx), s;
      if (__builtin_add_overflow(l, r, &s)) throw EvalError("addition overflow");
      return s;
    }
    case Term::Kind::Mul: {
      uint64_t l = eval_t(t->a, ctx), r = eval_t(t->b, ctx), s;
      if (__builtin_mul_overflow(l, r, &s)) throw EvalError("multiplication overflow");
      return s;
    }
  }
  throw EvalError("corrupt term");
}

bool eval_f(const FormulaPtr& f, EvalCtx& ctx) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return eval_t(f->t, ctx) == eval_t(f->u, ctx);
    case Formula::Kind::Leq:
      return eval_t(f->t, ctx) <= eval_t(f->u, ctx);
    case Formula::Kind::In:
      return ctx.str(f->var).bit(eval_t(f->t, ctx));
    case Formula::Kind::Not:
      return !eval_f(f->f, ctx);
    case Formula::Kind::And:
      return eval_f(f->f, ctx) && eval_f(f->g, ctx);
    case Formula::Kind::Or:
      return eval_f(f->f, ctx) || eval_f(f->g, ctx);
    case Formula::Kind::Imp:
      return !eval_f(f->f, ctx) || eval_f(f->g, ctx);
    case Formula::Kind::All: {
      uint64_t bound = eval_t(f->t, ctx);
      ctx.frames.emplace_back(f->var, 0);
      for (uint64_t v = 0;; ++v) {
        ctx.frames.back().second = v;
        if (!eval_f(f->f, ctx)) {
          ctx.frames.pop_back();
          return false;
        }
        if (v == bound) break;
      }
      ctx.frames.pop_back();
      return true;
    }
    case Formula::Kind::Ex: {
      uint64_t bound = eval_t(f->t, ctx);
      ctx.frames.emplace_back(f->var, 0);
      for (uint64_t v = 0;; ++v) {
        ctx.frames.back().second = v;
        if (eval_f(f->f, ctx)) {
          ctx.frames.pop_back();
          return true;
        }
        if (v == bound) break;
      }
      ctx.frames.pop_back();
      return false;
    }
  }
  throw EvalError("corrupt formula");
}

}  // namespace

uint64_t eval_term(const TermPtr& t, const Environment& env) {
  EvalCtx ctx{env, {}};
  return eval_t(t, ctx);
}

bool eval_formula(const FormulaPtr& f, const Environment& env) {
  EvalCtx ctx{env, {}};
  return eval_f(f, ctx);
}

namespace {
void collect_free(const FormulaPtr& f, std::vector<std::string>& bound, FreeVars& out) {
  auto term_free = [&](const TermPtr& t) {
    std::set<std::string> nums, strs;
    collect_term_vars(t, nums, strs);
    for (auto& n : nums)
      if (std::find(bound.begin(), bound.end(), n) == bound.end()) out.nums.insert(n);
    for (auto& s : strs) out.strs.insert(s);
  };
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Leq:
      term_free(f->t);
      term_free(f->u);
      return;
    case Formula::Kind::In:
      out.strs.insert(f->var);
      term_free(f->t);
      return;
    case Formula::Kind::Not:
      collect_free(f->f, bound, out);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
      collect_free(f->f, bound, out);
      collect_free(f->g, bound, out);
      return;
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      term_free(f->t);
      bound.push_back(f->var);
      collect_free(f->f, bound, out);
      bound.pop_back();
      return;
  }
}
}  // namespace

FreeVars free_variables(const FormulaPtr& f) {
  FreeVars out;
  std::vector<std::string> bound;
  collect_free(f, bound, out);
  return out;
}

// --- parsing -----------------------------------------------------------

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  std::string word() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos;
    }
    if (pos == start) fail("expected a token");
    return std::string(text.substr(start, pos - start));
  }

  bool is_numvar(const std::string& w) {
    if (w.empty() || !std::islower(static_cast<unsigned char>(w[0]))) return false;
    for (char c : w)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
  }

  bool is_strvar(const std::string& w) {
    if (w.empty() || !std::isupper(static_cast<unsigned char>(w[0]))) return false;
    for (char c : w)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
  }

  std::string strvar() {
    size_t at = pos;
    std::string w = word();
    if (!is_strvar(w)) throw ParseError("expected a string variable, got '" + w + "'", at);
    return w;
  }

  std::string numvar() {
    size_t at = pos;
    std::string w = word();
    if (!is_numvar(w)) throw ParseError("expected a number variable, got '" + w + "'", at);
    return w;
  }

  TermPtr term() {
    char c = peek();
    if (c == '(') {
      ++pos;
      size_t at = pos;
      std::string op = word();
      TermPtr result;
      if (op == "+" || op == "*") {
        TermPtr l = term();
        TermPtr r = term();
        result = op == "+" ? t_add(std::move(l), std::move(r)) : t_mul(std::move(l), std::move(r));
      } else if (op == "len") {
        result = t_len(strvar());
      } else {
        throw ParseError("unknown term operator '" + op + "'", at);
      }
      expect(')');
      return result;
    }
    size_t at = pos;
    std::string w = word();
    if (w == "0") return t_zero();
    if (w == "1") return t_one();
    if (is_numvar(w)) return t_var(w);
    throw ParseError("expected a term, got '" + w + "'", at);
  }

  FormulaPtr formula() {
    expect('(');
    size_t at = pos;
    std::string op = word();
    FormulaPtr result;
    if (op == "=" || op == "<=") {
      TermPtr l = term();
      TermPtr r = term();
      result = op == "=" ? f_eq(std::move(l), std::move(r)) : f_leq(std::move(l), std::move(r));
    } else if (op == "in") {
      std::string v = strvar();
      result = f_in(std::move(v), term());
    } else if (op == "not") {
      result = f_not(formula());
    } else if (op == "and" || op == "or" || op == "imp") {
      FormulaPtr l = formula();
      FormulaPtr r = formula();
      result = op == "and"  ? f_and(std::move(l), std::move(r))
               : op == "or" ? f_or(std::move(l), std::move(r))
                            : f_imp(std::move(l), std::move(r));
    } else if (op == "all" || op == "ex") {
      size_t vat = pos;
      std::string w = word();
      if (is_strvar(w)) throw ParseError("cannot quantify string variable '" + w + "'", vat);
      if (!is_numvar(w)) throw ParseError("expected a number variable, got '" + w + "'", vat);
      TermPtr bound = term();
      FormulaPtr body = formula();
      try {
        result = op == "all" ? f_all(w, std::move(bound), std::move(body))
                             : f_ex(w, std::move(bound), std::move(body));
      } catch (const StructureError& e) {
        throw ParseError(e.what(), at);
      }
    } else {
      throw ParseError("unknown formula operator '" + op + "'", at);
    }
    expect(')');
    return result;
  }

  void eof() {
    skip_ws();
    if (pos < text.size()) fail("trailing input");
  }
};

}  // namespace

TermPtr parse_term(std::string_view text) {
  Parser p{text};
  TermPtr t = p.term();
  p.eof();
  return t;
}

FormulaPtr parse_formula(std::string_view text) {
  Parser p{text};
  FormulaPtr f = p.formula();
  p.eof();
  return f;
}

// --- rendering ---------------------------------------------------------

namespace {
void render_t(const TermPtr& t, std::string& out) {
  switch (t->kind) {
    case Term::Kind::Zero:
      out += '0';
      return;
    case Term::Kind::One:
      out += '1';
      return;
    case Term::Kind::Var:
      out += t->name;
      return;
    case Term::Kind::Len:
      out += "(len ";
      out += t->name;
      out += ')';
      return;
    case Term::Kind::Add:
    case Term::Kind::Mul:
      out += t->kind == Term::Kind::Add ? "(+ " : "(* ";
      render_t(t->a, out);
      out += ' ';
      render_t(t->b, out);
      out += ')';
      return;
  }
}

void render_f(const FormulaPtr& f, std::string& out) {
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Leq:
      out += f->kind == Formula::Kind::Eq ? "(= " : "(<= ";
      render_t(f->t, out);
      out += ' ';
      render_t(f->u, out);
      out += ')';
      return;
    case Formula::Kind::In:
      out += "(in ";
      out += f->var;
      out += ' ';
      render_t(f->t, out);
      out += ')';
      return;
    case Formula::Kind::Not:
      out += "(not ";
      render_f(f->f, out);
      out += ')';
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
      out += f->kind == Formula::Kind::And  ? "(and "
             : f->kind == Formula::Kind::Or ? "(or "
                                            : "(imp ";
      render_f(f->f, out);
      out += ' ';
      render_f(f->g, out);
      out += ')';
      return;
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      out += f->kind == Formula::Kind::All ? "(all " : "(ex ";
      out += f->var;
      out += ' ';
      render_t(f->t, out);
      out += ' ';
      render_f(f->f, out);
      out += ')';
      return;
  }
}

void infix_t(const TermPtr& t, std::string& out) {
  switch (t->kind) {
    case Term::Kind::Zero:
      out += '0';
      return;
    case Term::Kind::One:
      out += '1';
      return;
    case Term::Kind::Var:
      out += t->name;
      return;
    case Term::Kind::Len:
      out += '|';
      out += t->name;
      out += '|';
      return;
    case Term::Kind::Add:
    case Term::Kind::Mul:
      out += '(';
      infix_t(t->a, out);
      out += t->kind == Term::Kind::Add ? " + " : " * ";
      infix_t(t->b, out);
      out += ')';
      return;
  }
}

void infix_f(const FormulaPtr& f, std::string& out) {
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Leq:
      infix_t(f->t, out);
      out += f->kind == Formula::Kind::Eq ? " = " : " <= ";
      infix_t(f->u, out);
      return;
    case Formula::Kind::In:
      out += f->var;
      out += '(';
      infix_t(f->t, out);
      out += ')';
      return;
    case Formula::Kind::Not:
      out += "~(";
      infix_f(f->f, out);
      out += ')';
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
      out += '(';
      infix_f(f->f, out);
      out += f->kind == Formula::Kind::And  ? " & "
             : f->kind == Formula::Kind::Or ? " v "
                                            : " -> ";
      infix_f(f->g, out);
      out += ')';
      return;
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      out += f->kind == Formula::Kind::All ? "A " : "E ";
      out += f->var;
      out += " <= ";
      infix_t(f->t, out);
      out += ". (";
      infix_f(f->f, out);
      out += ')';
      return;
  }
}
}  // namespace

std::string render(const TermPtr& t) {
  std::string out;
  render_t(t, out);
  return out;
}

std::string render(const FormulaPtr& f) {
  std::string out;
  render_f(f, out);
  return out;
}

std::string render_infix(const FormulaPtr& f) {
  std::string out;
  infix_f(f, out);
  return out;
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->name != b->name) return false;
  if ((a->a == nullptr) != (b->a == nullptr)) return false;
  if (a->a && !equal(a->a, b->a)) return false;
  if ((a->b == nullptr) != (b->b == nullptr)) return false;
  if (a->b && !equal(a->b, b->b)) return false;
  return true;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->var != b->var) return false;
  if ((a->t == nullptr) != (b->t == nullptr)) return false;
  if (a->t && !equal(a->t, b->t)) return false;
  if ((a->u == nullptr) != (b->u == nullptr)) return false;
  if (a->u && !equal(a->u, b->u)) return false;
  if ((a->f == nullptr) != (b->f == nullptr)) return false;
  if (a->f && !equal(a->f, b->f)) return false;
  if ((a->g == nullptr) != (b->g == nullptr)) return false;
  if (a->g && !equal(a->g, b->g)) return false;
  return true;
}

}  // namespace reduct::sigma
