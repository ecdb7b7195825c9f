#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "saa/block_dictionary.hpp"
#include "saa/linalg.hpp"

namespace saa {

enum class SolverKind { Tsaa, Msaa, Iht, Htp, Sp, Cosamp, Omp, Fista };

// Canonical display names: TSAA, MSAA, IHT, HTP, SP, CoSaMP, OMP, FISTA.
std::string to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);  // case-insensitive

struct SolverConfig {
  int sparsity = 1;          // K
  int tau = -1;              // candidate-set size in S3; -1 means tau = K
  int max_iters = 100;
  double residual_tol = 0.0;   // stop when ||y - A x|| <= residual_tol
  double iterate_tol = 1e-8;   // stop when ||x_k - x_{k-1}|| / ||x_k|| <= tol
  bool record_trace = false;
  double fista_lambda = 4e-5;

  int effective_tau() const { return tau < 0 ? sparsity : tau; }
  void validate() const;  // K >= 0, K <= tau <= 2K, max_iters >= 1, tols >= 0
};

struct TraceEntry {
  double residual_norm = 0.0;
  // Filled only when a ground truth is supplied to the solve call.
  double error_to_truth = std::numeric_limits<double>::quiet_NaN();
  double error_to_truth_block_max = std::numeric_limits<double>::quiet_NaN();
  int nnz = 0;
};

enum class StopReason { Residual, IterateChange, MaxIters };
std::string to_string(StopReason reason);

struct SolveResult {
  Eigen::VectorXd x_hat;
  int iterations = 0;
  double final_residual = 0.0;
  StopReason stop_reason = StopReason::MaxIters;
  std::vector<TraceEntry> trace;  // entry k-1 describes iterate x^(k)
};

// Iterate plus the partition vectors y_i = Phi_i x_i for blocks 2..p
// (0-based blocks 1..p-1); y_1 is implicit.
struct SolverState {
  Eigen::VectorXd x;
  std::vector<Eigen::VectorXd> partition;
  int iteration = 0;
  double residual_norm = 0.0;
};

// Lambda = L_tau(x_tilde) union L_{2K-tau}(gradient); the union is a plain
// set union (no padding), and the gradient is ignored when tau = 2K.
IndexSet candidate_support(const Eigen::VectorXd& x_tilde,
                           const Eigen::VectorXd& gradient, int k, int tau);

SolverState tsaa_init(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const Eigen::VectorXd* x0 = nullptr,
                      const Eigen::VectorXd* yb0 = nullptr);
SolverState tsaa_step(SolverState state, const BlockDictionary& a,
                      const Eigen::VectorXd& y, const SolverConfig& cfg);
SolveResult tsaa_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                       const SolverConfig& cfg,
                       const Eigen::VectorXd* x0 = nullptr,
                       const Eigen::VectorXd* yb0 = nullptr,
                       const Eigen::VectorXd* truth = nullptr);

SolverState msaa_init(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const Eigen::VectorXd* x0 = nullptr,
                      const std::vector<Eigen::VectorXd>* partition0 = nullptr);
SolverState msaa_step(SolverState state, const BlockDictionary& a,
                      const Eigen::VectorXd& y, const SolverConfig& cfg);
SolveResult msaa_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                       const SolverConfig& cfg,
                       const Eigen::VectorXd* x0 = nullptr,
                       const std::vector<Eigen::VectorXd>* partition0 = nullptr,
                       const Eigen::VectorXd* truth = nullptr);

// IHT, HTP, SP, CoSaMP, OMP, FISTA behind the same stopping rules.
SolveResult baseline_solve(SolverKind kind, const BlockDictionary& a,
                           const Eigen::VectorXd& y, const SolverConfig& cfg,
                           const Eigen::VectorXd* truth = nullptr);

// Dispatch on kind (TSAA/MSAA use their default initial points).
SolveResult solve(SolverKind kind, const BlockDictionary& a,
                  const Eigen::VectorXd& y, const SolverConfig& cfg,
                  const Eigen::VectorXd* truth = nullptr);

}  // namespace saa
