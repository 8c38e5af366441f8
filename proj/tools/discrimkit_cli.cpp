// discrimkit command line tool.
//
// Verbs: gram, check, optimize, bounds, synthesize, simulate. Every verb
// writes one JSON report to stdout (or --out) and communicates verdicts
// through the exit code: 0 success/feasible/pass, 1 negative verdict,
// 2 input error, 3 numerical failure. Reports carry the tool version,
// the tolerances in force and a full input echo, and are byte-identical
// across reruns with the same inputs and seed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discrimkit/optimizer.hpp"
#include "discrimkit/problem_io.hpp"
#include "discrimkit/simulator.hpp"
#include "discrimkit/synthesis.hpp"
#include "discrimkit/two_state.hpp"

namespace {

using namespace discrimkit;

constexpr const char* kToolVersion = "1.0.0";

json complex_json(const cplx& v) { return json::array({v.real(), v.imag()}); }

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json tolerances_json() {
  json t;
  t["rel_psd_tol"] = kRelPsdTol;
  t["rel_rank_tol"] = kRelRankTol;
  t["rel_asymmetry_tol"] = kRelAsymmetryTol;
  t["unit_diag_tol"] = kUnitDiagTol;
  t["prob_slack"] = kProbSlack;
  t["curve_bisect_tol"] = kCurveBisectTol;
  return t;
}

json report_shell(const char* command) {
  json j;
  j["tool"] = "discrimkit";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["tolerances"] = tolerances_json();
  return j;
}

void emit(const json& report, const std::string& out_path) {
  const std::string text = write_json(report);
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw invalid_input("cannot write report to \"" + out_path + "\"");
  f << text;
}

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
  if (flag_given) return flag_value;
  const char* env = std::getenv("DISCRIMKIT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw invalid_input(std::string("DISCRIMKIT_SEED is not an unsigned "
                                    "integer: \"") +
                        env + "\"");
  return static_cast<std::uint64_t>(v);
}

json feasibility_json(const FeasibilityReport& feas) {
  json f;
  f["feasible"] = feas.verdict.is_psd;
  f["residual_min_eigenvalue"] = feas.verdict.min_eigenvalue;
  f["tolerance_used"] = feas.verdict.tolerance_used;
  f["on_boundary"] = feas.verdict.on_boundary();
  return f;
}

json probability_json(const ProbabilityReport& rep) {
  json p;
  json per = json::array();
  for (std::size_t i = 0; i < rep.p_d.size(); ++i) {
    json row;
    row["p_d"] = rep.p_d[i];
    row["p_e"] = rep.p_e[i];
    row["p_i"] = rep.p_i[i];
    per.push_back(row);
  }
  p["per_state"] = per;
  json avg;
  avg["p_d"] = rep.avg_d;
  avg["p_e"] = rep.avg_e;
  avg["p_i"] = rep.avg_i;
  p["average"] = avg;
  return p;
}

double max_image_gram_deviation(const Realization& r, const GramMatrix& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < r.n; ++i)
    for (std::size_t j = 0; j < r.n; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t k = 0; k < r.output_dim(); ++k)
        acc += std::conj(r.images(i, k)) * r.images(j, k);
      worst = std::max(worst, std::abs(acc - x.powered()(i, j)));
    }
  return worst;
}

double max_identity_deviation(const ComplexMatrix& m) {
  const ComplexMatrix g = m.adjoint() * m;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? cplx{1.0, 0.0}
                                                         : cplx{0.0, 0.0})));
  return worst;
}

struct CommonArgs {
  std::string problem_path;
  std::string out_path;
};

int run_gram(const CommonArgs& args) {
  const Problem p = load_problem(args.problem_path);
  const StateSet states = to_state_set(p);
  const GramMatrix x = gram(states);
  const IndependenceVerdict li = linear_independence(x);

  json report = report_shell("gram");
  report["input"] = problem_to_json(p);
  json res;
  res["n"] = states.n();
  res["dim"] = states.dim();
  res["copies"] = x.copies();
  res["max_normalization_correction"] = states.max_normalization_correction();
  res["base"] = matrix_json(x.base().entries());
  res["powered"] = matrix_json(x.powered().entries());
  json ind;
  ind["independent"] = li.independent;
  ind["min_eigenvalue"] = li.min_eigenvalue;
  ind["threshold"] = li.threshold;
  res["linear_independence"] = ind;
  report["results"] = res;
  emit(report, args.out_path);
  return 0;
}

int run_check(const CommonArgs& args) {
  const Problem p = load_problem(args.problem_path);
  const StateSet states = to_state_set(p);
  const Strategy s = to_strategy(p);
  const GramMatrix x = gram(states);
  const FeasibilityReport feas = feasibility(x, s);

  json report = report_shell("check");
  report["input"] = problem_to_json(p);
  json res;
  res["feasibility"] = feasibility_json(feas);
  res["probabilities"] = probability_json(probability_report(s, states.priors()));
  res["dominance_condition"] = dominance_condition(s);
  report["results"] = res;
  emit(report, args.out_path);
  return feas.verdict.is_psd ? 0 : 1;
}

int run_optimize(const CommonArgs& args, bool uniform_gamma) {
  const Problem p = load_problem(args.problem_path);
  const StateSet states = to_state_set(p);
  const GramMatrix x = gram(states);
  const IndependenceVerdict li = linear_independence(x);

  json report = report_shell("optimize");
  report["input"] = problem_to_json(p);
  json res;
  res["objective"] = "avg";
  res["uniform_gamma"] = uniform_gamma;
  json ind;
  ind["independent"] = li.independent;
  ind["min_eigenvalue"] = li.min_eigenvalue;
  res["linear_independence"] = ind;
  if (!li.independent) {
    res["note"] =
        "states linearly dependent; exact discrimination probability 0 "
        "for dependent directions";
    report["results"] = res;
    emit(report, args.out_path);
    return 1;
  }

  const ExactOptimum opt = uniform_gamma
                               ? maximize_exact_uniform(x, states.priors())
                               : maximize_exact(x, states.priors());
  res["gamma_star"] = opt.gamma_star;
  res["objective_value"] = opt.objective;
  res["boundary_eigenvalue"] = opt.boundary_eigenvalue;
  res["iterations"] = opt.iterations;
  if (states.n() == 2) {
    const TwoStateProblem two(x.base()(0, 1), x.copies());
    res["idp_limit"] = idp_limit(two);
  }
  report["results"] = res;
  emit(report, args.out_path);
  return 0;
}

struct BoundsArgs {
  std::vector<double> overlap;
  long long copies = 1;
  double p_i = -1.0;
  bool p_i_given = false;
  double p_s = -1.0;
  bool p_s_given = false;
  std::string out_path;
};

int run_bounds(const BoundsArgs& args) {
  const cplx overlap{args.overlap[0],
                     args.overlap.size() > 1 ? args.overlap[1] : 0.0};
  const TwoStateProblem prob(overlap, args.copies);

  json report = report_shell("bounds");
  json input;
  input["overlap"] = complex_json(overlap);
  input["copies"] = args.copies;
  if (args.p_i_given) input["p_i"] = args.p_i;
  if (args.p_s_given) input["p_s"] = args.p_s;
  report["input"] = input;

  json res;
  res["powered_overlap"] = complex_json(prob.p_ip);
  res["helstrom"] = helstrom(prob);
  res["idp_limit"] = idp_limit(prob);
  if (args.p_i_given) {
    const InterpolationBand band = interpolation_band(prob, args.p_i);
    json b;
    b["lower"] = band.lower;
    b["upper"] = band.upper;
    b["lower_sq"] = band.lower_sq;
    b["upper_sq"] = band.upper_sq;
    b["lower_clamped"] = band.lower_clamped;
    res["interpolation_band"] = b;
  }
  if (args.p_s_given) {
    const SeparationPoint sp(args.p_s, prob);
    const SeparationBound sb = separation_error_bound(sp);
    json sep;
    sep["p_s"] = sp.p_s;
    sep["p_h"] = sp.p_h;
    sep["p_idp"] = sp.p_idp;
    sep["error_bound"] = sb.bound;
    sep["condition_met"] = sb.condition_met;
    res["separation"] = sep;
  }
  const bool real_overlap = std::abs(prob.p_ip.imag()) <= kProbSlack &&
                            prob.p_ip.real() >= -kProbSlack;
  if (real_overlap) {
    json curve = json::array();
    for (int k = 0; k <= 10; ++k) {
      const double p_d_plus = static_cast<double>(k) / 10.0;
      try {
        const double p_d_minus = zero_inconclusive_curve(prob, p_d_plus);
        json pt;
        pt["p_d_plus"] = p_d_plus;
        pt["p_d_minus"] = p_d_minus;
        curve.push_back(pt);
      } catch (const invalid_input&) {
        // no zero-inconclusive operating point at this detection rate
      }
    }
    res["zero_inconclusive_curve"] = curve;
  } else {
    res["zero_inconclusive_curve_note"] =
        "omitted: requires a real nonnegative powered overlap";
  }
  report["results"] = res;
  emit(report, args.out_path);
  return 0;
}

int run_synthesize(const CommonArgs& args, bool with_unitary) {
  const Problem p = load_problem(args.problem_path);
  const StateSet states = to_state_set(p);
  const Strategy s = to_strategy(p);
  const GramMatrix x = gram(states);
  const FeasibilityReport feas = feasibility(x, s);

  json report = report_shell("synthesize");
  report["input"] = problem_to_json(p);
  json res;
  res["feasibility"] = feasibility_json(feas);
  if (!feas.verdict.is_psd) {
    report["results"] = res;
    emit(report, args.out_path);
    return 1;
  }

  Realization r = synthesize(x, s);
  res["span_rank"] = r.span_rank;
  res["output_dim"] = r.output_dim();
  res["images"] = matrix_json(r.images);
  res["completion"] = matrix_json(r.completion);
  res["span_coords"] = matrix_json(r.span_coords);
  res["isometry"] = matrix_json(r.isometry);
  res["gram_preservation_residual"] = max_image_gram_deviation(r, x);
  res["isometry_orthonormality_residual"] = max_identity_deviation(r.isometry);
  if (with_unitary) {
    r = complete_unitary(std::move(r));
    res["workspace_dim"] = r.workspace_dim();
    res["completed_unitary"] = matrix_json(r.completed_unitary);
    res["unitarity_residual"] = max_identity_deviation(r.completed_unitary);
  }
  report["results"] = res;
  emit(report, args.out_path);
  return 0;
}

struct SimulateArgs {
  CommonArgs common;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t shards = 1;
};

int run_simulate(const SimulateArgs& args) {
  const Problem p = load_problem(args.common.problem_path);
  const StateSet states = to_state_set(p);
  const Strategy s = to_strategy(p);
  const GramMatrix x = gram(states);
  const FeasibilityReport feas = feasibility(x, s);
  const std::uint64_t seed = resolve_seed(args.seed_given, args.seed);

  json report = report_shell("simulate");
  report["input"] = problem_to_json(p);
  report["seed"] = seed;
  json res;
  res["feasibility"] = feasibility_json(feas);
  if (!feas.verdict.is_psd) {
    report["results"] = res;
    emit(report, args.common.out_path);
    return 1;
  }

  const Realization r = synthesize(x, s);
  const ShotConfig cfg{args.shots, seed, args.shards};
  const EmpiricalReport emp = run_shots(r, states, cfg);
  const ProbabilityReport analytic = probability_report(s, states.priors());
  const GofResult gof = chi_square_gof(emp, analytic);

  res["shots"] = emp.shots;
  res["seed"] = emp.seed;
  res["shards"] = emp.shards;
  json per = json::array();
  for (const StateTally& t : emp.per_state) {
    json row;
    row["shots"] = t.shots;
    row["n_d"] = t.n_d;
    row["n_e"] = t.n_e;
    row["n_i"] = t.n_i;
    row["freq_d"] = t.freq_d;
    row["freq_e"] = t.freq_e;
    row["freq_i"] = t.freq_i;
    row["z_d"] = t.z_d;
    row["z_e"] = t.z_e;
    row["z_i"] = t.z_i;
    if (t.flag_d || t.flag_e || t.flag_i)
      row["degenerate_mismatch"] =
          json::array({t.flag_d, t.flag_e, t.flag_i});
    per.push_back(row);
  }
  res["per_state"] = per;
  json agg;
  agg["freq_d"] = emp.agg_d;
  agg["freq_e"] = emp.agg_e;
  agg["freq_i"] = emp.agg_i;
  res["aggregate"] = agg;
  res["max_abs_z"] = emp.max_abs_z;
  json chi;
  chi["statistic"] = gof.statistic;
  chi["degrees"] = gof.degrees;
  chi["p_value"] = gof.p_value;
  chi["pass"] = gof.pass;
  chi["degenerate"] = gof.degenerate;
  res["chi_square"] = chi;
  const bool pass = gof.pass && !emp.any_flag;
  res["pass"] = pass;
  report["results"] = res;
  emit(report, args.common.out_path);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum state discrimination workbench"};
  app.require_subcommand(1);

  CommonArgs gram_args;
  CLI::App* cmd_gram = app.add_subcommand(
      "gram", "Gram matrices and linear independence of a state set");
  cmd_gram->add_option("problem", gram_args.problem_path, "problem file")
      ->required();
  cmd_gram->add_option("--out", gram_args.out_path, "write the report here");

  CommonArgs check_args;
  CLI::App* cmd_check = app.add_subcommand(
      "check", "feasibility of the strategy block against the Gram matrix");
  cmd_check->add_option("problem", check_args.problem_path, "problem file")
      ->required();
  cmd_check->add_option("--out", check_args.out_path, "write the report here");

  CommonArgs optimize_args;
  bool uniform_gamma = false;
  std::string objective = "avg";
  CLI::App* cmd_optimize = app.add_subcommand(
      "optimize", "maximize exact-discrimination success probability");
  cmd_optimize
      ->add_option("problem", optimize_args.problem_path, "problem file")
      ->required();
  cmd_optimize->add_flag("--uniform-gamma", uniform_gamma,
                         "restrict to a common detection probability");
  cmd_optimize
      ->add_option("--objective", objective,
                   "objective to maximize (prior-weighted average)")
      ->check(CLI::IsMember({"avg"}));
  cmd_optimize->add_option("--out", optimize_args.out_path,
                           "write the report here");

  BoundsArgs bounds_args;
  CLI::App* cmd_bounds = app.add_subcommand(
      "bounds", "closed-form two-state bounds for a given overlap");
  cmd_bounds
      ->add_option("--overlap", bounds_args.overlap,
                   "single-copy overlap, re [im]")
      ->expected(1, 2)
      ->required();
  cmd_bounds
      ->add_option("--copies", bounds_args.copies, "copies per experiment")
      ->check(CLI::PositiveNumber);
  CLI::Option* p_i_opt = cmd_bounds->add_option(
      "--p-i", bounds_args.p_i, "inconclusive rate for the interpolation band");
  CLI::Option* p_s_opt = cmd_bounds->add_option(
      "--p-s", bounds_args.p_s, "separation probability for the error bound");
  cmd_bounds->add_option("--out", bounds_args.out_path,
                         "write the report here");

  CommonArgs synth_args;
  bool with_unitary = false;
  CLI::App* cmd_synth = app.add_subcommand(
      "synthesize", "explicit isometry realizing a feasible strategy");
  cmd_synth->add_option("problem", synth_args.problem_path, "problem file")
      ->required();
  cmd_synth->add_flag("--complete-unitary", with_unitary,
                      "also extend the isometry to a workspace unitary");
  cmd_synth->add_option("--out", synth_args.out_path, "write the report here");

  SimulateArgs sim_args;
  CLI::App* cmd_sim = app.add_subcommand(
      "simulate", "Monte Carlo shots against the synthesized realization");
  cmd_sim->add_option("problem", sim_args.common.problem_path, "problem file")
      ->required();
  cmd_sim->add_option("--shots", sim_args.shots, "number of measurement runs")
      ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = cmd_sim->add_option(
      "--seed", sim_args.seed, "RNG seed (falls back to DISCRIMKIT_SEED)");
  cmd_sim->add_option("--shards", sim_args.shards, "parallel shard count")
      ->check(CLI::PositiveNumber);
  cmd_sim->add_option("--out", sim_args.common.out_path,
                      "write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_gram->parsed()) return run_gram(gram_args);
    if (cmd_check->parsed()) return run_check(check_args);
    if (cmd_optimize->parsed()) return run_optimize(optimize_args, uniform_gamma);
    if (cmd_bounds->parsed()) {
      bounds_args.p_i_given = p_i_opt->count() > 0;
      bounds_args.p_s_given = p_s_opt->count() > 0;
      return run_bounds(bounds_args);
    }
    if (cmd_synth->parsed()) return run_synthesize(synth_args, with_unitary);
    if (cmd_sim->parsed()) {
      sim_args.seed_given = seed_opt->count() > 0;
      return run_simulate(sim_args);
    }
  } catch (const invalid_input& e) {
    std::cerr << "discrimkit: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "discrimkit: numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
