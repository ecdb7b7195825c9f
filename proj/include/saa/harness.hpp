#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "saa/block_dictionary.hpp"
#include "saa/solvers.hpp"

namespace saa::harness {

struct SweepSpec {
  int m = 200;
  int p = 2;
  std::vector<int> k_grid;  // empty -> 20 + 5i up to floor(0.55 m)
  int trials_per_k = 100;
  std::vector<SolverKind> solvers;
  double noise_level = 0.0;
  std::uint64_t master_seed = 1;
  std::map<SolverKind, int> max_iters;  // per-kind overrides
  bool zero_time = false;  // write 0 in the time column (byte-reproducible CSV)

  // Keys: {m, p, K_grid, trials_per_K, solvers, noise_level, master_seed,
  //        max_iters:{solver:count}, zero_time?}
  static SweepSpec from_json_text(const std::string& text);
  static SweepSpec from_json_file(const std::string& path);

  std::vector<int> effective_k_grid() const;
  int effective_max_iters(SolverKind kind, int k) const;
  void validate() const;
};

struct TrialRecord {
  SolverKind solver;
  int k = 0;
  int trial_index = 0;
  bool success = false;
  int iterations = 0;
  double wall_time_s = 0.0;
  double final_relative_error = 0.0;
  std::string stop_reason;
};

struct SweepRow {
  SolverKind solver;
  int k = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_time_s = 0.0;
  double mean_iters = 0.0;
};

struct SweepReport {
  SweepSpec spec;
  std::vector<TrialRecord> trials;
  std::vector<SweepRow> rows;  // solver-major (spec order), then K ascending

  // Columns exactly: solver,K,trials,successes,success_rate,mean_time_s,mean_iters
  std::string to_csv() const;
  const SweepRow* find(SolverKind solver, int k) const;
};

// One instance per (K, trial) shared by every solver; a solver exception is
// recorded as a failed trial, never aborts the sweep.
SweepReport run_sweep(const SweepSpec& spec);

struct FewIterationRow {
  SolverKind solver;
  int budget = 0;
  int k = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
};

struct FewIterationReport {
  std::vector<FewIterationRow> rows;
  std::string to_csv() const;  // solver,budget,K,trials,successes,success_rate
  const FewIterationRow* find(SolverKind solver, int budget, int k) const;
};

// Fixed iteration budgets, no other stopping rule; budget 0 judges the zero
// vector. Solvers restricted to TSAA/HTP/SP/CoSaMP.
FewIterationReport run_few_iteration_study(const SweepSpec& spec,
                                           const std::vector<int>& budgets);

// Fraction of adjacent-K pairs whose success rate increases by more than
// 3/trials (phase-transition sanity metric).
double monotonicity_violation_fraction(const SweepReport& report);

// Binary dictionary container: magic "BLKDCT01", u32 m, u32 p, then p
// blocks of m*m row-major little-endian f64.
void save_dictionary(const BlockDictionary& a, const std::string& path);
BlockDictionary load_dictionary(const std::string& path);

// Subcommands: coherence, solve, sweep, few-it, verify-lemmas, bounds, image.
// Returns 0 on success, 2 on spec/usage error, 3 on numerical failure.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace saa::harness
