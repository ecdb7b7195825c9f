#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "saa/errors.hpp"
#include "saa/harness.hpp"
#include "saa/imaging.hpp"
#include "saa/synthetic.hpp"
#include "saa/theory.hpp"

namespace saa::harness {

namespace {

using nlohmann::json;

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file " + path);
  out << text;
  if (!out) throw numerical_error("write failed for " + path);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stoi(item));
  }
  return values;
}

void print_bound_report(const theory::BoundReport& report) {
  json doc;
  doc["mu"] = report.mu;
  doc["m"] = report.m;
  doc["p"] = report.p;
  doc["K"] = report.k;
  doc["uniqueness_bound"] = report.uniqueness_bound;
  doc[report.p == 2 ? "tsaa_condition_rhs" : "msaa_condition_rhs"] =
      report.condition_rhs;
  doc["condition_holds"] = report.condition_holds;
  if (report.rho) doc["rho"] = *report.rho;
  if (report.eta) doc["eta"] = *report.eta;
  std::cout << doc.dump(2) << "\n";
}

int run_coherence(const std::string& matrix_file, const std::string& gen,
                  const std::string& save, int k) {
  std::optional<BlockDictionary> dict;
  if (!gen.empty()) {
    const std::vector<int> parts = parse_int_list(gen);
    if (parts.size() != 3) {
      throw std::invalid_argument("--gen expects seed,m,p");
    }
    dict = BlockDictionary::random(static_cast<std::uint64_t>(parts[0]),
                                   parts[1], parts[2]);
  } else if (!matrix_file.empty()) {
    dict = load_dictionary(matrix_file);
  } else {
    throw std::invalid_argument("coherence: give a matrix file or --gen seed,m,p");
  }
  if (!save.empty()) save_dictionary(*dict, save);
  const double mu = dict->mutual_coherence();
  print_bound_report(
      theory::evaluate_bounds(mu, dict->block_dim(), dict->block_count(), k));
  return 0;
}

int run_solve(const std::string& solver, std::uint64_t seed, int m, int p,
              int k, double noise, int tau, int max_iters, double residual_tol,
              double iterate_tol) {
  const SolverKind kind = parse_solver_kind(solver);
  const Instance inst = gen_instance({seed, m, p, k, noise});
  SolverConfig cfg;
  cfg.sparsity = k;
  cfg.tau = tau;
  cfg.max_iters = max_iters > 0 ? max_iters
                                : SweepSpec{}.effective_max_iters(kind, k);
  cfg.residual_tol = residual_tol;
  cfg.iterate_tol = iterate_tol;
  const SolveResult result = solve(kind, inst.a, inst.y, cfg);
  const double rel_error =
      (result.x_hat - inst.x_star).norm() / inst.x_star.norm();
  json doc;
  doc["solver"] = to_string(kind);
  doc["m"] = m;
  doc["p"] = p;
  doc["K"] = k;
  doc["seed"] = seed;
  doc["noise_level"] = noise;
  doc["iterations"] = result.iterations;
  doc["final_residual"] = result.final_residual;
  doc["stop_reason"] = to_string(result.stop_reason);
  doc["relative_error"] = rel_error;
  doc["success"] = recovery_success(result.x_hat, inst.x_star);
  int nnz = 0;
  for (Eigen::Index i = 0; i < result.x_hat.size(); ++i) {
    if (result.x_hat[i] != 0.0) ++nnz;
  }
  doc["nnz"] = nnz;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int run_verify_lemmas(int trials, std::uint64_t seed) {
  struct Suite {
    std::string name;
    theory::OracleReport report;
  };
  const std::vector<Suite> suites = {
      {"hk_bound(n=32,K=5)", theory::check_hk_bound(trials, 32, 5, seed)},
      {"row_bound(7x5,alpha=0.3)",
       theory::check_row_bound(trials, 7, 5, 0.3, derive_seed(seed, 1))},
      {"offdiag_bound(m=16,p=2,|L|=7)",
       theory::check_offdiag_bound(trials, 16, 2, 7, derive_seed(seed, 2))},
      {"offdiag_bound(m=16,p=3,|L|=7)",
       theory::check_offdiag_bound(trials, 16, 3, 7, derive_seed(seed, 3))},
      {"offdiag_bound(m=16,p=5,|L|=7)",
       theory::check_offdiag_bound(trials, 16, 5, 7, derive_seed(seed, 4))},
      {"ls_error_bound(m=16,p=2,K=1)",
       theory::check_ls_error_bound(trials, 16, 2, 1, derive_seed(seed, 5))},
  };
  long total_violations = 0;
  for (const auto& suite : suites) {
    std::printf("%-32s trials=%ld violations=%ld skipped=%ld max_ratio=%.6f\n",
                suite.name.c_str(), suite.report.trials,
                suite.report.violations, suite.report.skipped,
                suite.report.max_ratio);
    total_violations += suite.report.violations;
  }
  if (total_violations > 0) {
    throw numerical_error("lemma oracle violations: " +
                          std::to_string(total_violations));
  }
  std::cout << "all lemma oracles passed\n";
  return 0;
}

int run_image(const std::string& input, const std::string& output,
              const std::string& iters, std::uint64_t seed,
              const std::string& trace_path, const std::string& solver,
              int levels) {
  const imaging::GrayImage img = imaging::read_pgm(input);
  const Eigen::Index n = static_cast<Eigen::Index>(img.width) * img.height;
  if (n % 2 != 0) {
    throw std::invalid_argument("image: width*height must be even");
  }
  const int m = static_cast<int>(n / 2);
  const BlockDictionary dict = BlockDictionary::random(seed, m, 2);
  std::vector<int> record = parse_int_list(iters);
  if (record.empty()) record = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (record.size() == 1 && record[0] > 1) {
    // A single number means "record every iteration up to it".
    const int last = record[0];
    record.clear();
    for (int i = 1; i <= last; ++i) record.push_back(i);
  }
  SolverConfig cfg;
  cfg.sparsity = 0;  // floor(m/3)
  cfg.max_iters = *std::max_element(record.begin(), record.end());
  const imaging::ReconstructionReport report = imaging::reconstruct_image(
      img, dict, cfg, record, parse_solver_kind(solver), levels);
  imaging::write_pgm(report.image, output);
  const std::string csv = imaging::psnr_trace_csv(report.psnr_trace);
  if (!trace_path.empty()) {
    write_text_file(trace_path, csv);
  } else {
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Sparse recovery over concatenated orthogonal dictionaries"};
  app.require_subcommand(1);

  // coherence
  auto* coherence = app.add_subcommand(
      "coherence", "Mutual coherence and certified sparsity bounds");
  std::string matrix_file;
  std::string gen_spec;
  std::string save_path;
  int coherence_k = 1;
  coherence->add_option("matrix", matrix_file, "dictionary container file");
  coherence->add_option("--gen", gen_spec, "generate from seed,m,p");
  coherence->add_option("--save", save_path, "save the dictionary container");
  coherence->add_option("--K", coherence_k, "sparsity level for the report");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver on one instance");
  std::string solver_name = "tsaa";
  std::uint64_t solve_seed = 1;
  int solve_m = 200;
  int solve_p = 2;
  int solve_k = 20;
  double solve_noise = 0.0;
  int solve_tau = -1;
  int solve_max_iters = 0;
  double solve_rtol = 0.0;
  double solve_xtol = 1e-8;
  solve_cmd->add_option("--solver", solver_name, "tsaa|msaa|iht|htp|sp|cosamp|omp|fista");
  solve_cmd->add_option("--seed", solve_seed, "instance seed");
  solve_cmd->add_option("--m", solve_m, "block dimension");
  solve_cmd->add_option("--p", solve_p, "block count");
  solve_cmd->add_option("--K", solve_k, "sparsity level");
  solve_cmd->add_option("--noise", solve_noise, "noise level epsilon");
  solve_cmd->add_option("--tau", solve_tau, "candidate size (default K)");
  solve_cmd->add_option("--max-iters", solve_max_iters, "iteration budget");
  solve_cmd->add_option("--residual-tol", solve_rtol, "residual stopping tol");
  solve_cmd->add_option("--iterate-tol", solve_xtol, "iterate-change tol");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Success-rate sweep from a JSON spec");
  std::string sweep_spec_path;
  std::string sweep_out;
  bool sweep_zero_time = false;
  sweep_cmd->add_option("spec", sweep_spec_path, "JSON spec file")->required();
  sweep_cmd->add_option("-o,--out", sweep_out, "output CSV path (default stdout)");
  sweep_cmd->add_flag("--zero-time", sweep_zero_time,
                      "write zeros in the time column (byte-reproducible)");

  // few-it
  auto* fewit_cmd = app.add_subcommand("few-it", "Fixed-budget recovery study");
  std::string fewit_spec_path;
  std::string fewit_out;
  std::string fewit_budgets = "3,4,5,6,7";
  fewit_cmd->add_option("spec", fewit_spec_path, "JSON spec file")->required();
  fewit_cmd->add_option("-o,--out", fewit_out, "output CSV path (default stdout)");
  fewit_cmd->add_option("--budgets", fewit_budgets, "comma list of budgets");

  // verify-lemmas
  auto* lemmas_cmd = app.add_subcommand("verify-lemmas", "Randomized lemma oracles");
  int lemma_trials = 1000;
  std::uint64_t lemma_seed = 20240901;
  lemmas_cmd->add_option("--trials", lemma_trials, "trials per oracle");
  lemmas_cmd->add_option("--seed", lemma_seed, "oracle seed");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate closed-form bounds");
  double bounds_mu = 0.0;
  int bounds_m = 0;
  int bounds_p = 2;
  int bounds_k = 1;
  bounds_cmd->add_option("--mu", bounds_mu, "mutual coherence")->required();
  bounds_cmd->add_option("--m", bounds_m, "block dimension")->required();
  bounds_cmd->add_option("--p", bounds_p, "block count")->required();
  bounds_cmd->add_option("--K", bounds_k, "sparsity level")->required();

  // image
  auto* image_cmd = app.add_subcommand("image", "Wavelet-domain reconstruction");
  std::string image_in;
  std::string image_out;
  std::string image_iters;
  std::uint64_t image_seed = 7;
  std::string image_trace;
  std::string image_solver = "tsaa";
  int image_levels = 6;
  image_cmd->add_option("input", image_in, "input PGM (P5)")->required();
  image_cmd->add_option("output", image_out, "output PGM (P5)")->required();
  image_cmd->add_option("--iters", image_iters,
                        "iteration list (1,4,9) or a single max count");
  image_cmd->add_option("--seed", image_seed, "dictionary seed");
  image_cmd->add_option("--trace", image_trace, "PSNR trace CSV path");
  image_cmd->add_option("--solver", image_solver, "tsaa|iht");
  image_cmd->add_option("--levels", image_levels, "wavelet levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (coherence->parsed()) {
      return run_coherence(matrix_file, gen_spec, save_path, coherence_k);
    }
    if (solve_cmd->parsed()) {
      return run_solve(solver_name, solve_seed, solve_m, solve_p, solve_k,
                       solve_noise, solve_tau, solve_max_iters, solve_rtol,
                       solve_xtol);
    }
    if (sweep_cmd->parsed()) {
      SweepSpec spec = SweepSpec::from_json_file(sweep_spec_path);
      if (sweep_zero_time) spec.zero_time = true;
      const std::string csv = run_sweep(spec).to_csv();
      if (!sweep_out.empty()) {
        write_text_file(sweep_out, csv);
      } else {
        std::cout << csv;
      }
      return 0;
    }
    if (fewit_cmd->parsed()) {
      const SweepSpec spec = SweepSpec::from_json_file(fewit_spec_path);
      const std::string csv =
          run_few_iteration_study(spec, parse_int_list(fewit_budgets)).to_csv();
      if (!fewit_out.empty()) {
        write_text_file(fewit_out, csv);
      } else {
        std::cout << csv;
      }
      return 0;
    }
    if (lemmas_cmd->parsed()) {
      return run_verify_lemmas(lemma_trials, lemma_seed);
    }
    if (bounds_cmd->parsed()) {
      print_bound_report(
          theory::evaluate_bounds(bounds_mu, bounds_m, bounds_p, bounds_k));
      return 0;
    }
    if (image_cmd->parsed()) {
      return run_image(image_in, image_out, image_iters, image_seed,
                       image_trace, image_solver, image_levels);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace saa::harness
