#include "reduct/simulate.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "reduct/errors.hpp"
#include "reduct/evalenc.hpp"
#include "reduct/prover.hpp"
#include "reduct/taut.hpp"
#include "reduct/translate.hpp"

namespace reduct::simulate {

namespace {

// Closes off ledger records against the derivation's running counters.
class StageTracker {
 public:
  StageTracker(const prover::Derivation& d, std::vector<StageRecord>& out)
      : d_(d), out_(out) {}

  void close(const std::string& label) {
    StageRecord rec;
    rec.stage = label;
    rec.lines_added = d_.line_count() - last_lines_;
    rec.symbols_added = d_.current_size() - last_size_;
    rec.cumulative_size = d_.current_size();
    out_.push_back(rec);
    last_lines_ = d_.line_count();
    last_size_ = d_.current_size();
  }

 private:
  const prover::Derivation& d_;
  std::vector<StageRecord>& out_;
  uint64_t last_lines_ = 0;
  uint64_t last_size_ = 0;
};

}  // namespace

SimulationRun simulate(const circuits::ProofSystemSpec& spec,
                       const StringValue& u0, Mode mode) {
  if (!spec.compute || !spec.circuit_family)
    throw StructureError("proof system lacks compute or circuit_family");
  SimulationRun run;
  run.system = spec.name;
  run.input = u0;
  run.mode = mode;

  // stage 1: run the system and its verifier circuit on U_0
  const uint64_t len_u = u0.length();
  if (len_u == 0) throw StructureError("stage compute: U_0 is empty");
  const prop::Formula a = spec.compute(u0);
  const StringValue enc_a = evalenc::encode_formula(a);
  const uint64_t len_y = enc_a.length();
  const std::vector<prop::Formula> order = evalenc::encode_order(a);
  const circuits::Circuit circuit = spec.circuit_family(len_u, len_y);
  const std::vector<bool> inputs(u0.bits().begin(), u0.bits().end() - 1);
  const StringValue w0 = circuits::run_circuit(circuit, inputs);
  if (circuit.ybits.size() + 1 != len_y)
    throw StructureError("stage compute: circuit emits the wrong bit count");
  if (!w0.bit(circuit.accept))
    throw StructureError("stage compute: circuit rejects its own computation");
  for (uint64_t r = 0; r + 1 < len_y; ++r)
    if (w0.bit(circuit.ybits[r]) != enc_a.bit(r))
      throw StructureError("stage compute: circuit output is not the encoding");
  run.conclusion = a;
  run.wire_trace = w0;

  circuits::SoundProfile sp;
  sp.len_u = len_u;
  sp.len_y = len_y;
  sp.len_x = prop::atoms(a).size() + 1;
  sp.len_z = order.size() + 1;
  sp.len_w = circuit.gates.size() + 1;
  run.profile = sp;

  // stage 2: the soundness statement translated at this profile
  const sigma::FormulaPtr sound = circuits::build_sound_g(spec, sp);
  const prop::Formula s = translate::translate(sound, sp.profile());
  if (s.op() != prop::Op::Imp || s.left().op() != prop::Op::And)
    throw StructureError("stage sound: translation lost its shape");

  // stage 3's substitution: every proof bit, encoding bit, and wire bit
  std::map<prop::Atom, prop::Formula> sigma0 =
      evalenc::bit_substitution("U", u0);
  {
    const auto sy = evalenc::bit_substitution("Y", enc_a);
    const auto sw = evalenc::bit_substitution("W", w0);
    sigma0.insert(sy.begin(), sy.end());
    sigma0.insert(sw.begin(), sw.end());
  }
  const prop::Formula s1 = prop::substitute(s, sigma0);

  std::vector<prop::Formula> premises;
  std::vector<prop::Formula> imports;
  if (mode == Mode::Premise) {
    premises.push_back(s);
  } else {
    if (prop::atoms(s1).size() > taut::atom_cap())
      throw CapExceeded("oracle import needs more atoms than the oracle cap");
    imports.push_back(s1);
  }

  prover::Derivation d(premises, imports);
  StageTracker tracker(d, run.stages);
  tracker.close("compute");

  uint64_t s1_id = 0;
  if (mode == Mode::Premise) {
    d.mark("soundness translation, declared as the premise");
    const uint64_t s_id = d.premise(0);
    tracker.close("sound");
    d.mark("substitute the proof, encoding, and trace bits");
    s1_id = d.sub(s_id, sigma0);
    tracker.close("substitute-bits");
  } else {
    d.mark("soundness instance, imported against the base system");
    s1_id = d.import_line(0);
    tracker.close("sound");
    d.mark("bit substitution is folded into the imported instance");
    tracker.close("substitute-bits");
  }
  if (d.formula(s1_id) != s1)
    throw StructureError("stage substitute-bits: instance mismatch");

  // stage 4: the verifier half is closed and true; fold it away
  d.mark("fold the closed verifier conjunct to T");
  const prop::Formula e1 = s1.left().left();
  const prop::Formula c1 = s1.left().right();
  prover::EquivEngine eng(d);
  const uint64_t c1_id = eng.value_line(c1);
  const uint64_t e2_to_e1 = eng.equiv_bwd(e1);
  const prop::Formula e2 = d.formula(e2_to_e1).left();
  const uint64_t e2_to_c1 = d.weaken(c1_id, e2);
  const uint64_t e2_to_and = d.combine_imp_and(e2_to_e1, e2_to_c1);
  const uint64_t s2_id = d.syl(e2_to_and, s1_id);
  const prop::Formula s2 = d.formula(s2_id);
  if (s2 != prop::fold_constants(s1))
    throw StructureError("stage fold: folded instance mismatch");
  tracker.close("fold-verifier");

  // stage 5: substitute the tautology's atoms and subformulas
  d.mark("substitute the formula's atoms and subformulas");
  const uint64_t s3_id = d.sub(s2_id, evalenc::xz_substitution(a));
  const prop::Formula s3 = d.formula(s3_id);
  if (s3.op() != prop::Op::Imp || s3.right() != a)
    throw StructureError("stage substitute-formula: conclusion slot mismatch");
  tracker.close("substitute-formula");

  // stage 6: the antecedent is self-evident; discharge it
  d.mark("discharge the evaluation antecedent");
  const uint64_t ante_id = prover::prove_self_evident(d, s3.left());
  const uint64_t a_id = d.mp(ante_id, s3_id);
  if (d.formula(a_id) != a)
    throw StructureError("stage discharge: conclusion mismatch");
  d.conclude(a_id);
  tracker.close("discharge");

  proofs::FPlusProof out;
  out.derivation = d.take();
  if (mode == Mode::OracleImport)
    out.imports.push_back({s1, circuits::truth_table_base_proof(s1)});

  proofs::Verdict v;
  if (mode == Mode::Premise)
    v = proofs::check_proof(out.derivation, {s});
  else
    v = proofs::check_fplus(out, circuits::truth_table_base());
  if (!v.accepted)
    throw StructureError("pipeline output rejected: " + v.reason);
  if (out.derivation.conclusion() != a)
    throw StructureError("pipeline concluded the wrong formula");
  run.output = std::move(out);
  return run;
}

std::string render_simrun(const SimulationRun& run) {
  using nlohmann::ordered_json;
  std::string out;
  for (const StageRecord& s : run.stages) {
    ordered_json j;
    j["stage"] = s.stage;
    j["lines_added"] = s.lines_added;
    j["symbols_added"] = s.symbols_added;
    j["cumulative_size"] = s.cumulative_size;
    out += j.dump();
    out += '\n';
  }
  ordered_json fin;
  fin["verdict"] = "accepted";
  fin["conclusion"] = prop::render(run.conclusion);
  fin["mode"] = run.mode == Mode::Premise ? "premise" : "oracle-import";
  fin["proof_symbols"] = proofs::proof_size(run.output);
  fin["proof_lines"] = run.output.derivation.lines.size();
  out += fin.dump();
  out += '\n';
  return out;
}

BenchResult bench_polynomiality(const circuits::ProofSystemSpec& spec,
                                const std::vector<StringValue>& inputs,
                                Mode mode) {
  BenchResult res;
  res.rows.reserve(inputs.size());
  for (const StringValue& u : inputs) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationRun run = simulate(spec, u, mode);
    const auto t1 = std::chrono::steady_clock::now();
    BenchRow row;
    row.input_bits = u.length();
    row.proof_symbols = proofs::proof_size(run.output);
    row.proof_lines = run.output.derivation.lines.size();
    row.seconds = std::chrono::duration<double>(t1 - t0).count();
    res.rows.push_back(row);
  }

  std::vector<double> xs, ys;
  for (const BenchRow& r : res.rows) {
    xs.push_back(std::log(double(r.input_bits)));
    ys.push_back(std::log(double(r.proof_symbols)));
  }
  const size_t m = xs.size();
  if (m < 2) return res;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(m);
  my /= double(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return res;  // one size only: slope stays 0, unfitted
  res.fitted = true;
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;
  res.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  res.residuals.reserve(m);
  for (size_t i = 0; i < m; ++i)
    res.residuals.push_back(ys[i] - (res.intercept + res.slope * xs[i]));
  return res;
}

std::string bench_csv(const BenchResult& r) {
  std::string out = "input_bits,proof_symbols,proof_lines\n";
  for (const BenchRow& row : r.rows) {
    out += std::to_string(row.input_bits);
    out += ',';
    out += std::to_string(row.proof_symbols);
    out += ',';
    out += std::to_string(row.proof_lines);
    out += '\n';
  }
  return out;
}

prop::Formula excluded_middle_chain(uint64_t k) {
  if (k == 0) throw StructureError("need at least one conjunct");
  prop::Formula acc;
  for (uint64_t i = 1; i <= k; ++i) {
    const prop::Formula q = prop::f_atom(prop::Atom::named(i));
    const prop::Formula block = prop::f_or(q, prop::f_not(q));
    acc = i == 1 ? block : prop::f_and(acc, block);
  }
  return acc;
}

WitnessReport verify_membership_witness(
    const sigma::FormulaPtr& phi,
    const std::map<std::vector<uint64_t>, std::vector<uint8_t>>& witnesses,
    const proofs::BaseSystemHandle& base) {
  const circuits::ProofSystemSpec spec = circuits::make_formula_system(phi);
  WitnessReport rep;
  if (witnesses.empty()) {
    rep.accepted = true;
    rep.vacuous = true;
    return rep;
  }
  for (const auto& [lengths, bytes] : witnesses) {
    const prop::Formula expected =
        spec.compute(circuits::formula_system_input(lengths));
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                                bytes.size());
    prop::Formula got;
    uint64_t symbols = 0;
    std::string reason;
    try {
      if (proofs::looks_like_fplus(text)) {
        const proofs::FPlusProof p = proofs::parse_fplus(text);
        symbols = proofs::proof_size(p);
        const proofs::Verdict v = proofs::check_fplus(p, base);
        if (!v.accepted)
          reason = "rejected: " + v.reason;
        else
          got = p.derivation.conclusion();
      } else {
        const proofs::Proof p = proofs::parse_proof(text);
        symbols = proofs::proof_size(p);
        if (!p.premises.empty()) {
          reason = "not premise-free";
        } else {
          const proofs::Verdict v = proofs::check_proof(p);
          if (!v.accepted)
            reason = "rejected: " + v.reason;
          else
            got = p.conclusion();
        }
      }
    } catch (const ParseError&) {
      reason = "unparseable";
    }
    if (reason.empty() && got != expected)
      reason = "concludes a different formula";
    if (!reason.empty()) rep.issues.push_back({lengths, reason});
    rep.sizes.emplace_back(lengths, symbols);
  }
  rep.accepted = rep.issues.empty();
  return rep;
}

}  // namespace reduct::simulate
