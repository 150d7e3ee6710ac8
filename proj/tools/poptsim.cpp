// Command-line surface for the block-positive correlation toolkit.
//
// Subcommands: gen, check, quantize, verify, chsh, lp-bound, reconstruct.
// Exit codes: 0 success, 1 computation-level failure, 2 parse error,
// 3 file invariant violation.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "poptsim/poptsim.hpp"

namespace {

using namespace poptsim;

struct GlobalOptions {
  std::uint64_t seed = 42;
  double tol = 1e-8;
  int restarts = 64;
  double eps = 0.0;
  std::string out;
  bool json = false;
};

std::ostream& value_stream() {
  std::cout << std::setprecision(12);
  return std::cout;
}

void emit_json(const GlobalOptions& opt, const Json& j) {
  if (opt.json) std::cout << j.dump() << "\n";
}

// Zero-pad W to equal local dimensions; probabilities are unaffected since
// the padded blocks vanish.
PoptState pad_to_square_dims(const PoptState& state) {
  if (state.dim_a == state.dim_b) return state;
  const int m = std::max(state.dim_a, state.dim_b);
  Matrix w(m * m, m * m);
  for (int i = 0; i < state.dim_a; ++i)
    for (int ip = 0; ip < state.dim_a; ++ip)
      for (int j = 0; j < state.dim_b; ++j)
        for (int jp = 0; jp < state.dim_b; ++jp)
          w(i * m + j, ip * m + jp) = state.w(i * state.dim_b + j, ip * state.dim_b + jp);
  std::cerr << "note: padding dims (" << state.dim_a << ", " << state.dim_b << ") to (" << m
            << ", " << m << ") with zero blocks\n";
  PoptState padded = popt_from_matrix(w, m, m);
  padded.evidence = state.evidence;
  return padded;
}

PoptState load_state_as_popt(const std::string& path) {
  const Json j = load_json(path);
  const std::string kind = kind_of(j);
  if (kind == "popt") return pad_to_square_dims(popt_from_json(j));
  if (kind == "density") {
    const DensityFile df = density_from_json(j);
    PoptState s;
    try {
      s = from_quantum(df.rho, df.dim_a, df.dim_b);
    } catch (const Error& e) {
      throw InvariantViolation(e.what());
    }
    return pad_to_square_dims(s);
  }
  throw ParseError("expected a popt or density file, found kind \"" + kind + "\"");
}

Matrix load_sigma(const std::string& path, int& d_out) {
  const Json j = load_json(path);
  const std::string kind = kind_of(j);
  if (kind == "simulation") {
    const QuantumSimulation sim = simulation_from_json(j);
    d_out = sim.d;
    return sim.sigma;
  }
  if (kind == "density") {
    const DensityFile df = density_from_json(j);
    if (df.dim_a != df.dim_b) throw InvariantViolation("chsh: equal local dims required");
    d_out = df.dim_a;
    return df.rho;
  }
  throw ParseError("expected a simulation or density file, found kind \"" + kind + "\"");
}

int run_gen(const GlobalOptions& opt, const std::string& family, int d) {
  std::string out = opt.out.empty() ? family + ".json" : opt.out;
  Json result;
  result["command"] = "gen";
  result["family"] = family;
  result["path"] = out;

  if (family == "pr-box") {
    save_table(out, pr_box());
    std::cout << "wrote correlation table to " << out << "\n";
    emit_json(opt, result);
    return 0;
  }

  PoptState state;
  Rng rng = derived_rng(opt.seed, std::hash<std::string>{}(family));
  const int joint = d * d;
  if (family == "swap") {
    state = choi_of_transpose(d);
  } else if (family == "maxent") {
    const Vector phi = max_entangled(d);
    state = from_quantum(outer(phi, phi), d, d);
  } else if (family == "maxmix") {
    state = from_quantum(Matrix::identity(joint) / Complex(joint, 0.0), d, d);
  } else if (family == "random-density") {
    state = from_quantum(random_density(joint, rng), d, d);
  } else if (family == "pt-random") {
    // mostly-pure entangled state, partially transposed on Bob
    const Vector psi = random_unit_vector(joint, rng);
    const Matrix rho = outer(psi, psi) * Complex(0.75, 0.0) +
                       Matrix::identity(joint) * Complex(0.25 / joint, 0.0);
    state = partial_transpose_family(rho, d, d);
  } else if (family == "product") {
    state = from_quantum(kron(random_density(d, rng), random_density(d, rng)), d, d);
  } else if (family == "basis00") {
    Matrix w(joint, joint);
    w(0, 0) = 1.0;
    state = from_quantum(w, d, d);
  } else {
    throw ParseError("unknown family \"" + family +
                     "\" (swap, maxent, maxmix, random-density, pt-random, product, basis00, "
                     "pr-box)");
  }
  save_popt(out, state);
  std::cout << "wrote " << family << " state (dims " << d << "x" << d << ") to " << out << "\n";
  result["dims"] = Json::array({d, d});
  emit_json(opt, result);
  return 0;
}

int run_check(const GlobalOptions& opt, const std::string& in) {
  const PoptState state = load_state_as_popt(in);
  const Classification c =
      classify(state.w, state.dim_a, state.dim_b, opt.restarts, 50, opt.seed, opt.tol);
  value_stream() << "class = " << to_string(c.cls) << "\n"
                 << "lambda_min = " << c.lambda_min << "\n"
                 << "min_product_value = " << c.overlap.value << " (restarts "
                 << c.evidence.restarts << ")\n";
  Json result;
  result["command"] = "check";
  result["class"] = to_string(c.cls);
  result["lambda_min"] = c.lambda_min;
  result["min_product_value"] = c.overlap.value;
  result["restarts"] = c.evidence.restarts;
  if (c.cls == PoptClass::kNotPoptEvidence) {
    std::cout << "witness alpha = " << vector_to_json(c.overlap.alpha).dump() << "\n"
              << "witness beta  = " << vector_to_json(c.overlap.beta).dump() << "\n";
    result["witness_alpha"] = vector_to_json(c.overlap.alpha);
    result["witness_beta"] = vector_to_json(c.overlap.beta);
    emit_json(opt, result);
    return 1;
  }
  emit_json(opt, result);
  return 0;
}

int run_quantize(const GlobalOptions& opt, const std::string& in) {
  const PoptState state = load_state_as_popt(in);
  const std::string out = opt.out.empty() ? "simulation.json" : opt.out;
  double eps_used = opt.eps;
  QuantumSimulation sim;
  try {
    sim = quantize(state, opt.eps);
  } catch (const SingularMError&) {
    if (opt.eps != 0.0) throw;
    eps_used = 1e-6;
    std::cerr << "note: image of the identity is singular; retrying with epsilon = 1e-06\n";
    sim = quantize(state, eps_used);
  }
  save_simulation(out, sim);
  value_stream() << "epsilon = " << eps_used << "\n";
  std::cout << "wrote simulation to " << out << "\n";
  Json result;
  result["command"] = "quantize";
  result["epsilon"] = eps_used;
  result["path"] = out;
  emit_json(opt, result);
  return 0;
}

int run_verify(const GlobalOptions& opt, const std::string& popt_path,
               const std::string& sim_path, int trials) {
  const PoptState state = load_state_as_popt(popt_path);
  const QuantumSimulation sim = simulation_from_json(load_json(sim_path));
  const double deviation = verify_simulation(state, sim, trials, opt.seed);
  value_stream() << "max_deviation = " << deviation << " over " << trials << " POVM pairs\n";
  Json result;
  result["command"] = "verify";
  result["max_deviation"] = deviation;
  result["trials"] = trials;
  result["tol"] = opt.tol;
  emit_json(opt, result);
  if (deviation > opt.tol) {
    std::cerr << "verification failed: deviation exceeds tol " << opt.tol << "\n";
    return 1;
  }
  return 0;
}

int run_chsh(const GlobalOptions& opt, const std::string& table_path,
             const std::string& state_path) {
  Json result;
  result["command"] = "chsh";
  const ClassicalChshResult classical = classical_chsh_max();
  value_stream() << "classical_max = " << classical.value << " (" << classical.maximizers.size()
                 << " deterministic maximizers)\n";
  result["classical_max"] = classical.value;
  if (!table_path.empty()) {
    const CorrelationTable t = table_from_json(load_json(table_path));
    const double v = chsh_value(t);
    const NoSignalingReport ns = check_no_signaling(t, 1e-10);
    value_stream() << "chsh(table) = " << v << "\n"
                   << "no_signaling = " << (ns.ok ? "ok" : "VIOLATED") << " (worst " << ns.worst
                   << ")\n";
    result["table_chsh"] = v;
    result["no_signaling_ok"] = ns.ok;
    result["no_signaling_worst"] = ns.worst;
    if (!ns.ok) {
      emit_json(opt, result);
      return 1;
    }
  }
  if (!state_path.empty()) {
    int d = 0;
    const Matrix sigma = load_sigma(state_path, d);
    const SeesawResult ss = seesaw_max_chsh(sigma, d, opt.restarts, 50, opt.seed);
    value_stream() << "seesaw = " << ss.value << " (restarts " << opt.restarts << ")\n";
    result["seesaw"] = ss.value;
    result["restarts"] = opt.restarts;
  }
  emit_json(opt, result);
  return 0;
}

int run_lp_bound(const GlobalOptions& opt, int n_constraints) {
  const double bound = popt_chsh_lp_bound(tsirelson_settings_alice(), tsirelson_settings_bob(),
                                          n_constraints, opt.seed);
  value_stream() << "lp_bound = " << bound << " (n = " << n_constraints << ")\n";
  Json result;
  result["command"] = "lp-bound";
  result["bound"] = bound;
  result["n_constraints"] = n_constraints;
  emit_json(opt, result);
  return 0;
}

int run_reconstruct(const GlobalOptions& opt, const std::string& in,
                    const std::string& tabulation_path, const std::string& save_tabulation,
                    int trials) {
  Json result;
  result["command"] = "reconstruct";

  Povm ica, icb;
  std::vector<std::vector<double>> table;
  const PoptState* reference = nullptr;
  PoptState source;

  if (!in.empty()) {
    source = load_state_as_popt(in);
    if (source.dim_a != source.dim_b) {
      throw InvariantViolation("reconstruct: equal local dims required");
    }
    const int d = source.dim_a;
    ica = ic_povm(d, mix_seed(opt.seed, 1));
    icb = ic_povm(d, mix_seed(opt.seed, 2));
    value_stream() << "frame_condition = " << frame_condition(ica) << " (Alice), "
                   << frame_condition(icb) << " (Bob)\n";
    result["frame_condition_alice"] = frame_condition(ica);
    result["frame_condition_bob"] = frame_condition(icb);
    const PreparationOracle oracle = popt_oracle(source);
    const OracleNoSignalingReport ns = verify_oracle_no_signaling(oracle, trials, opt.seed);
    value_stream() << "oracle_no_signaling = " << (ns.ok ? "ok" : "VIOLATED") << " (worst "
                   << ns.worst << ")\n";
    result["oracle_no_signaling_ok"] = ns.ok;
    table = tabulate_omega(oracle, ica, icb);
    reference = &source;
    if (!save_tabulation.empty()) {
      // a tabulation is a one-setting correlation table over the IC frames
      CorrelationTable t(1, 1, d * d, d * d);
      for (int a = 0; a < d * d; ++a)
        for (int b = 0; b < d * d; ++b) t.at(0, 0, a, b) = table[a][b];
      save_table(save_tabulation, t);
      std::cout << "wrote tabulation to " << save_tabulation << "\n";
      result["tabulation_path"] = save_tabulation;
    }
  } else if (!tabulation_path.empty()) {
    const CorrelationTable t = table_from_json(load_json(tabulation_path));
    if (t.nx != 1 || t.ny != 1) {
      throw InvariantViolation("reconstruct: tabulation must have nx = ny = 1");
    }
    const int d2 = t.na;
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    if (d * d != d2 || t.nb != d2) {
      throw InvariantViolation("reconstruct: tabulation must be d^2 x d^2");
    }
    // the frames are regenerated from the same seed that produced the table
    ica = ic_povm(d, mix_seed(opt.seed, 1));
    icb = ic_povm(d, mix_seed(opt.seed, 2));
    table.assign(d2, std::vector<double>(d2, 0.0));
    for (int a = 0; a < d2; ++a)
      for (int b = 0; b < d2; ++b) table[a][b] = t.at(0, 0, a, b);
  } else {
    throw ParseError("reconstruct: supply --in or --tabulation");
  }

  const ReconstructionResult rec = reconstruct_popt(table, ica, icb);
  value_stream() << "residual = " << rec.residual << "\n";
  result["residual"] = rec.residual;
  if (reference != nullptr) {
    const double err = (rec.state.w - reference->w).frobenius_norm();
    value_stream() << "frobenius_error = " << err << "\n";
    result["frobenius_error"] = err;
  }
  if (!opt.out.empty()) {
    save_popt(opt.out, rec.state);
    std::cout << "wrote reconstructed state to " << opt.out << "\n";
    result["path"] = opt.out;
  }
  emit_json(opt, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-positive states, their quantum simulations, and CHSH tooling"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions opt;
  app.add_option("--seed", opt.seed, "master seed (default 42)");
  app.add_option("--tol", opt.tol, "tolerance for pass/fail decisions (default 1e-8)");
  app.add_option("--restarts", opt.restarts, "restarts for see-saw searches (default 64)");
  app.add_option("--eps", opt.eps, "regularization parameter (default 0, auto-retry 1e-6)");
  app.add_option("--out", opt.out, "output path");
  app.add_flag("--json", opt.json, "emit a single-line JSON result on stdout");

  auto* gen = app.add_subcommand("gen", "write an example state family to a file");
  std::string family;
  int gen_d = 2;
  gen->add_option("family", family,
                  "swap | maxent | maxmix | random-density | pt-random | product | basis00 | "
                  "pr-box")
      ->required();
  gen->add_option("--d", gen_d, "local dimension (default 2)");

  auto* check = app.add_subcommand("check", "classify a state file");
  std::string check_in;
  check->add_option("--in", check_in, "popt or density file")->required();

  auto* quant = app.add_subcommand("quantize", "build the quantum simulation of a state");
  std::string quant_in;
  quant->add_option("--in", quant_in, "popt or density file")->required();

  auto* verify = app.add_subcommand("verify", "compare a state against its simulation");
  std::string verify_popt, verify_sim;
  int verify_trials = 100;
  verify->add_option("--popt", verify_popt, "popt or density file")->required();
  verify->add_option("--sim", verify_sim, "simulation file")->required();
  verify->add_option("--trials", verify_trials, "random POVM pairs (default 100)");

  auto* chsh = app.add_subcommand("chsh", "game values: classical, table, see-saw");
  std::string chsh_table, chsh_state;
  chsh->add_option("--table", chsh_table, "correlation table file");
  chsh->add_option("--state", chsh_state, "density or simulation file for see-saw");

  auto* lp = app.add_subcommand("lp-bound", "sampled-constraint LP bound at optimal settings");
  int lp_n = 10000;
  lp->add_option("--n", lp_n, "number of sampled pure-tensor constraints (default 10000)");

  auto* rec = app.add_subcommand("reconstruct", "tabulate an oracle and invert the frame");
  std::string rec_in, rec_tab, rec_save_tab;
  int rec_trials = 20;
  rec->add_option("--in", rec_in, "popt or density file backing the oracle");
  rec->add_option("--tabulation", rec_tab, "precomputed tabulation (table file, nx = ny = 1)");
  rec->add_option("--save-tabulation", rec_save_tab, "also write the tabulated table here");
  rec->add_option("--trials", rec_trials, "oracle no-signaling probe count (default 20)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(opt, family, gen_d);
    if (check->parsed()) return run_check(opt, check_in);
    if (quant->parsed()) return run_quantize(opt, quant_in);
    if (verify->parsed()) return run_verify(opt, verify_popt, verify_sim, verify_trials);
    if (chsh->parsed()) return run_chsh(opt, chsh_table, chsh_state);
    if (lp->parsed()) return run_lp_bound(opt, lp_n);
    if (rec->parsed()) return run_reconstruct(opt, rec_in, rec_tab, rec_save_tab, rec_trials);
  } catch (const poptsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const poptsim::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const poptsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
