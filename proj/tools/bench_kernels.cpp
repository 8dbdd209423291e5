// Times the serial kernels against their OpenMP counterparts on three
// workloads: the assignment scan behind the tautology oracle, the string
// sweep behind the semantic oracle, and proof checking.  Each row reports
// both timings and whether the two kernels agreed; any disagreement makes
// the run exit nonzero.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "reduct/proofs.hpp"
#include "reduct/prop.hpp"
#include "reduct/prover.hpp"
#include "reduct/sigma.hpp"
#include "reduct/taut.hpp"
#include "reduct/translate.hpp"

namespace {

using namespace reduct;

double seconds_of(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  return d.count();
}

bool row(const char* name, const std::string& size, double serial,
         double parallel, bool agree) {
  std::printf("%-28s %-14s %9.3f s %9.3f s %7.2fx   %s\n", name, size.c_str(),
              serial, parallel, parallel > 0 ? serial / parallel : 0.0,
              agree ? "yes" : "NO");
  return agree;
}

// q1 v ~q1 & ... & qk v ~qk: a tautology, so the scan covers the whole
// assignment space.
prop::Formula or_not_chain(uint64_t k) {
  prop::Formula acc = prop::f_true();
  for (uint64_t i = 1; i <= k; ++i) {
    const prop::Formula q = prop::f_atom(prop::Atom::named(i));
    const prop::Formula clause = prop::f_or(q, prop::f_not(q));
    acc = i == 1 ? clause : prop::f_and(acc, clause);
  }
  return acc;
}

// ~(q1 & ... & qk): falsified only by the all-ones assignment, the last
// index the scan visits.
prop::Formula needle(uint64_t k) {
  prop::Formula acc = prop::f_atom(prop::Atom::named(uint64_t{1}));
  for (uint64_t i = 2; i <= k; ++i)
    acc = prop::f_and(acc, prop::f_atom(prop::Atom::named(i)));
  return prop::f_not(acc);
}

bool bench_taut(uint64_t bits) {
  bool ok = true;
  for (const bool with_needle : {false, true}) {
    const prop::Formula f = with_needle ? needle(bits) : or_not_chain(bits);
    const taut::CompiledEval ce(f);
    std::optional<uint64_t> serial_hit, parallel_hit;
    const double ts = seconds_of([&] { serial_hit = taut::find_counterexample_serial(ce); });
    const double tp = seconds_of([&] { parallel_hit = taut::find_counterexample_parallel(ce); });
    ok = row(with_needle ? "assignment scan, needle" : "assignment scan, full",
             "2^" + std::to_string(bits), ts, tp, serial_hit == parallel_hit) &&
         ok;
  }
  return ok;
}

bool bench_translate(uint64_t len) {
  // all x <= |X| (X(x) or not X(x)) holds for every string, so the sweep
  // covers all 2^(len-1) values of X.
  const std::string text =
      "(all x (len X) (or (in X x) (not (in X x))))";
  const sigma::FormulaPtr f = sigma::parse_formula(text);
  translate::LengthProfile prof;
  prof.lengths["X"] = len;
  bool serial_holds = false, parallel_holds = false;
  const double ts = seconds_of(
      [&] { serial_holds = translate::holds_for_all_strings(f, prof); });
  const double tp = seconds_of([&] {
    parallel_holds = translate::holds_for_all_strings(f, prof, nullptr, true);
  });
  return row("string sweep", "2^" + std::to_string(len - 1), ts, tp,
             serial_holds == parallel_holds && serial_holds);
}

bool bench_check(uint64_t leaves) {
  // A conjunction of `leaves` distinct closed true formulas; proving it
  // value-by-value yields a proof large enough to time the checker on.
  std::vector<prop::Formula> parts;
  parts.reserve(leaves);
  const uint64_t base = leaves < 2 ? 2 : leaves;
  for (uint64_t i = 0; i < leaves; ++i) {
    const uint64_t v = base + i;
    prop::Formula acc = prop::f_true();
    for (int j = 62 - __builtin_clzll(v); j >= 0; --j)
      acc = (v >> j) & 1 ? prop::f_and(acc, prop::f_true())
                         : prop::f_or(acc, prop::f_false());
    parts.push_back(acc);
  }
  const proofs::Proof p = prover::prove_closed(prop::f_and_all(parts));
  proofs::Verdict serial_v, parallel_v;
  proofs::CheckOptions serial_opts, parallel_opts;
  parallel_opts.parallel = true;
  const double ts =
      seconds_of([&] { serial_v = proofs::check_proof(p, {}, {}, serial_opts); });
  const double tp = seconds_of(
      [&] { parallel_v = proofs::check_proof(p, {}, {}, parallel_opts); });
  return row("proof check", std::to_string(p.lines.size()) + " lines", ts, tp,
             serial_v.accepted && parallel_v.accepted);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel timings"};
  uint64_t bits = 20, len = 19, leaves = 4096;
  app.add_option("--bits", bits, "atoms in the assignment scan")
      ->check(CLI::Range(uint64_t{2}, uint64_t{30}));
  app.add_option("--len", len, "string length in the semantic sweep")
      ->check(CLI::Range(uint64_t{2}, uint64_t{28}));
  app.add_option("--leaves", leaves, "conjuncts in the checked proof")
      ->check(CLI::Range(uint64_t{2}, uint64_t{1} << 20));
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %-14s %11s %11s %9s   %s\n", "kernel", "size", "serial",
              "parallel", "speedup", "agree");
  bool ok = bench_taut(bits);
  ok = bench_translate(len) && ok;
  ok = bench_check(leaves) && ok;
  return ok ? 0 : 1;
}
