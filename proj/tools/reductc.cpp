// Command-line front end: translation, proof checking, the soundness
// pipeline, brute-force oracles, and the polynomiality benchmark, all as
// batch subcommands over files.  Exit codes: 0 success (accepted / true),
// 1 semantic rejection (proof rejected, not a tautology), 2 malformed
// input or usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "reduct/circuits.hpp"
#include "reduct/errors.hpp"
#include "reduct/evalenc.hpp"
#include "reduct/proofs.hpp"
#include "reduct/prop.hpp"
#include "reduct/sigma.hpp"
#include "reduct/simulate.hpp"
#include "reduct/strings.hpp"
#include "reduct/taut.hpp"
#include "reduct/translate.hpp"

namespace {

using namespace reduct;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructureError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructureError("cannot write " + path);
  out << content;
  if (!out) throw StructureError("cannot write " + path);
}

// To the named file, or stdout when no path was given.
void emit(const std::string& content, const std::string& path) {
  if (path.empty())
    std::fputs(content.c_str(), stdout);
  else
    write_file(path, content);
}

std::string trimmed(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r'))
    ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' ||
                   s[e - 1] == '\r'))
    --e;
  return s.substr(b, e - b);
}

int cmd_translate(const std::string& file, const std::string& profile_text,
                  bool no_fold, const std::string& out) {
  const sigma::FormulaPtr f = sigma::parse_formula(read_file(file));
  const translate::LengthProfile prof =
      translate::LengthProfile::parse(profile_text);
  const prop::Formula p = translate::translate(f, prof, !no_fold);
  emit(prop::render(p) + "\n", out);
  return 0;
}

int cmd_check(const std::string& file, const std::string& premises_path,
              const std::string& base_name) {
  const std::string text = read_file(file);
  std::vector<prop::Formula> allowed;
  if (!premises_path.empty()) {
    const std::string ptext = read_file(premises_path);
    size_t pos = 0;
    while (pos < ptext.size()) {
      size_t eol = ptext.find('\n', pos);
      if (eol == std::string::npos) eol = ptext.size();
      const std::string line = trimmed(ptext.substr(pos, eol - pos));
      pos = eol + 1;
      if (!line.empty()) allowed.push_back(prop::parse_formula(line));
    }
  }
  proofs::Verdict v;
  if (proofs::looks_like_fplus(text)) {
    if (base_name != "truth-table") {
      std::fprintf(stderr, "unknown base system: %s\n", base_name.c_str());
      return 2;
    }
    v = proofs::check_fplus(proofs::parse_fplus(text),
                            circuits::truth_table_base(), allowed);
  } else {
    v = proofs::check_proof(proofs::parse_proof(text), allowed);
  }
  if (v.accepted) {
    std::puts("accepted");
    return 0;
  }
  const char* where = "";
  switch (v.where) {
    case proofs::Verdict::Where::Line: where = "line"; break;
    case proofs::Verdict::Where::Premise: where = "premise"; break;
    case proofs::Verdict::Where::ImportEntry: where = "import"; break;
    case proofs::Verdict::Where::None: where = "proof"; break;
  }
  std::printf("rejected at %s %llu: %s\n", where,
              static_cast<unsigned long long>(v.at), v.reason.c_str());
  return 1;
}

int make_system(const std::string& system, const std::string& phi_path,
                circuits::ProofSystemSpec& spec) {
  if (system == "truth-table") {
    spec = circuits::truth_table_system();
    return 0;
  }
  if (system == "formula") {
    if (phi_path.empty()) {
      std::fprintf(stderr, "--system formula needs --phi\n");
      return 2;
    }
    spec = circuits::make_formula_system(sigma::parse_formula(read_file(phi_path)));
    return 0;
  }
  std::fprintf(stderr, "unknown system: %s\n", system.c_str());
  return 2;
}

int cmd_simulate(const std::string& system, const std::string& phi_path,
                 const std::string& gproof, const std::string& mode_s,
                 const std::string& out) {
  circuits::ProofSystemSpec spec;
  if (int rc = make_system(system, phi_path, spec)) return rc;
  simulate::Mode mode;
  if (mode_s == "premise") {
    mode = simulate::Mode::Premise;
  } else if (mode_s == "oracle-import") {
    mode = simulate::Mode::OracleImport;
  } else {
    std::fprintf(stderr, "unknown mode: %s\n", mode_s.c_str());
    return 2;
  }
  const StringValue u0 = StringValue::parse01(trimmed(read_file(gproof)));
  const simulate::SimulationRun run = simulate::simulate(spec, u0, mode);
  std::fputs(simulate::render_simrun(run).c_str(), stdout);
  if (!out.empty()) {
    const std::string text = run.output.imports.empty()
                                 ? proofs::render_proof(run.output.derivation)
                                 : proofs::render_fplus(run.output);
    write_file(out, text);
  }
  return 0;
}

int cmd_oracle(const std::string& file, const std::string& profile_text) {
  const sigma::FormulaPtr f = sigma::parse_formula(read_file(file));
  const translate::LengthProfile prof =
      translate::LengthProfile::parse(profile_text);
  const prop::Formula t = translate::translate(f, prof);
  const bool taut = taut::is_tautology_bruteforce(t);
  std::printf("taut=%s\n", taut ? "true" : "false");
  const sigma::FreeVars fv = sigma::free_variables(f);
  bool eligible = fv.strs.size() <= 2;
  for (const std::string& var : fv.strs)
    eligible = eligible && prof.lengths.count(var) != 0 &&
               prof.lengths.at(var) <= 8;
  if (eligible) {
    const bool sem = translate::holds_for_all_strings(f, prof);
    std::printf("semantic=%s\n", sem ? "true" : "false");
    std::printf("agree=%s\n", taut == sem ? "true" : "false");
  }
  return taut ? 0 : 1;
}

std::vector<std::vector<uint64_t>> parse_tuples(const std::string& text) {
  std::vector<std::vector<uint64_t>> out;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<uint64_t> tuple;
    std::istringstream parts(group);
    std::string part;
    while (std::getline(parts, part, ',')) {
      const std::string p = trimmed(part);
      if (p.empty() || p.find_first_not_of("0123456789") != std::string::npos)
        throw StructureError("bad length tuple: " + text);
      tuple.push_back(std::stoull(p));
    }
    if (tuple.empty()) throw StructureError("bad length tuple: " + text);
    out.push_back(std::move(tuple));
  }
  if (out.empty()) throw StructureError("no length tuples given");
  return out;
}

int cmd_bench(const std::string& system, const std::string& phi_path,
              const std::string& family, uint64_t max_k,
              const std::string& tuples_s, const std::string& mode_s,
              const std::string& csv_path) {
  circuits::ProofSystemSpec spec;
  if (int rc = make_system(system, phi_path, spec)) return rc;
  simulate::Mode mode;
  if (mode_s == "premise") {
    mode = simulate::Mode::Premise;
  } else if (mode_s == "oracle-import") {
    mode = simulate::Mode::OracleImport;
  } else {
    std::fprintf(stderr, "unknown mode: %s\n", mode_s.c_str());
    return 2;
  }
  std::vector<StringValue> inputs;
  if (system == "truth-table") {
    if (family != "excluded-middle") {
      std::fprintf(stderr, "unknown family: %s\n", family.c_str());
      return 2;
    }
    if (max_k == 0) {
      std::fprintf(stderr, "--max-k must be positive\n");
      return 2;
    }
    for (uint64_t k = 1; k <= max_k; ++k)
      inputs.push_back(
          circuits::truth_table_proof(simulate::excluded_middle_chain(k)));
  } else {
    for (const std::vector<uint64_t>& tuple : parse_tuples(tuples_s))
      inputs.push_back(circuits::formula_system_input(tuple));
  }
  const simulate::BenchResult res =
      simulate::bench_polynomiality(spec, inputs, mode);
  for (size_t i = 0; i < res.rows.size(); ++i)
    std::fprintf(stderr, "run %zu: %llu bits, %.3f s\n", i,
                 static_cast<unsigned long long>(res.rows[i].input_bits),
                 res.rows[i].seconds);
  emit(simulate::bench_csv(res), csv_path);
  if (res.fitted) {
    std::printf("slope=%.6f\n", res.slope);
    std::printf("r2=%.6f\n", res.r2);
  } else {
    std::puts("slope omitted: need at least two distinct input sizes");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-sorted formulas, propositional translation, and checkable proofs"};
  app.require_subcommand(1);

  auto* t = app.add_subcommand("translate",
                               "translate a formula at fixed string lengths");
  std::string t_file, t_profile, t_out;
  bool t_no_fold = false;
  t->add_option("formula", t_file, "formula file")->required();
  t->add_option("--profile", t_profile,
                "lengths and number values, e.g. \"X=3;x=2\"");
  t->add_flag("--no-fold", t_no_fold, "keep constants in place");
  t->add_option("--out", t_out, "output file (default stdout)");

  auto* c = app.add_subcommand("check", "check a proof file");
  std::string c_file, c_premises, c_base = "truth-table";
  c->add_option("proof", c_file, "proof file")->required();
  c->add_option("--premises", c_premises, "allowed premises, one per line");
  c->add_option("--base", c_base, "base system for imports");

  auto* s = app.add_subcommand("simulate",
                               "compile a g-proof into a checkable proof");
  std::string s_system = "truth-table", s_phi, s_gproof, s_mode = "premise",
              s_out;
  s->add_option("gproof", s_gproof, "g-proof file (0/1 text)")->required();
  s->add_option("--system", s_system, "truth-table or formula");
  s->add_option("--phi", s_phi, "formula file for --system formula");
  s->add_option("--mode", s_mode, "premise or oracle-import");
  s->add_option("--out", s_out, "proof output file");

  auto* o = app.add_subcommand("oracle", "brute-force tautology check");
  std::string o_file, o_profile;
  o->add_option("formula", o_file, "formula file")->required();
  o->add_option("--profile", o_profile, "lengths and number values");

  auto* e = app.add_subcommand("evalgen", "print the evaluation formula");
  std::string e_out;
  e->add_option("--out", e_out, "output file (default stdout)");

  auto* b = app.add_subcommand("bench", "measure proof size growth");
  std::string b_system = "truth-table", b_phi, b_family = "excluded-middle",
              b_tuples, b_mode = "premise", b_csv;
  uint64_t b_max_k = 5;
  b->add_option("--system", b_system, "truth-table or formula");
  b->add_option("--phi", b_phi, "formula file for --system formula");
  b->add_option("--family", b_family, "input family for truth-table");
  b->add_option("--max-k", b_max_k, "largest family member");
  b->add_option("--tuples", b_tuples,
                "length tuples for --system formula, e.g. \"1;2;3;4\"");
  b->add_option("--mode", b_mode, "premise or oracle-import");
  b->add_option("--csv", b_csv, "table output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (t->parsed()) return cmd_translate(t_file, t_profile, t_no_fold, t_out);
    if (c->parsed()) return cmd_check(c_file, c_premises, c_base);
    if (s->parsed()) return cmd_simulate(s_system, s_phi, s_gproof, s_mode, s_out);
    if (o->parsed()) return cmd_oracle(o_file, o_profile);
    if (e->parsed()) {
      emit(sigma::render(evalenc::generate_eval()) + "\n", e_out);
      return 0;
    }
    if (b->parsed())
      return cmd_bench(b_system, b_phi, b_family, b_max_k, b_tuples, b_mode,
                       b_csv);
  } catch (const ParseError& err) {
    std::fprintf(stderr, "parse error: %s\n", err.what());
    return 2;
  } catch (const CapExceeded& err) {
    std::fprintf(stderr, "cap exceeded: %s\n", err.what());
    return 2;
  } catch (const EvalError& err) {
    std::fprintf(stderr, "evaluation error: %s\n", err.what());
    return 2;
  } catch (const StructureError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 2;
}
