#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "saa/block_dictionary.hpp"

#include <Eigen/Dense>

namespace saa::theory {

// omega = (sqrt(5)+1)/2, the golden ratio; omega^2 = omega + 1.
inline const double kOmega = (std::sqrt(5.0) + 1.0) / 2.0;
inline const double kOmega3 = 2.0 * kOmega + 1.0;  // omega^3
inline const double kC = std::sqrt(2.0) / (3.0 * kOmega3);

// tau1(p) = 2 / (omega (1 + 2 omega^2 (3p-2) sqrt(p))).
double tau1(int p);

// tau2(p) = 2 (2 - omega tau1) (1 - 2 tau1)^2 / (omega^3 (3p-2) p^{5/2});
// statement_variant replaces (1 - 2 tau1)^2 with the printed (1 - 3 tau1)^2.
double tau2(int p, bool statement_variant = false);

// (1/2)(1 + 1/mu); any sparsity strictly below certifies uniqueness.
double uniqueness_bound(double mu);

// (1/(2 mu)) min{ c, c (1-c)^2 / (m^2 mu^2) }.
double tsaa_condition_rhs(double mu, int m);

// rho = (3 K omega^3 mu / 2) sqrt([1 + (m mu/(1-K mu))^2]
//       [1 + (m mu/(1-2K mu))^2] [1 + (3 K omega mu / 2)^2]); needs 2K mu < 1.
double tsaa_contraction_ratio(int k, double mu, int m);

// (1/mu) min{ tau1(p), tau2(p) / (m^2 mu^2) }.
double msaa_condition_rhs(double mu, int m, int p);

// eta = [omega^3 K mu (3p-2) sqrt(p) / (2 - omega K mu)] *
//       sqrt([1 + (p m mu/(2(1-2K mu)))^2] [1 + (p m mu/(2(1-K mu)))^2]);
// statement_variant uses (1 - 3K mu) in the first bracket as printed.
double msaa_contraction_ratio(int k, double mu, int m, int p,
                              bool statement_variant = false);

bool check_tsaa_condition(double mu, int m, int k);
bool check_msaa_condition(double mu, int m, int p, int k);

struct BoundReport {
  double mu = 0.0;
  int m = 0;
  int p = 0;
  int k = 0;
  double uniqueness_bound = 0.0;
  double condition_rhs = 0.0;  // TSAA right-hand side for p = 2, MSAA for p > 2
  bool condition_holds = false;
  std::optional<double> rho;  // present when 2K mu < 1 (p = 2)
  std::optional<double> eta;  // present when 2K mu < 1 and omega K mu < 2
};

BoundReport evaluate_bounds(double mu, int m, int p, int k);

struct OracleReport {
  long trials = 0;
  long violations = 0;
  long skipped = 0;
  double max_ratio = 0.0;  // worst observed LHS/RHS over unskipped trials
};

// ||x - H_K(z)|| <= omega ||(x - z)_{S u S*}|| on random z and K-sparse x.
OracleReport check_hk_bound(int trials, int n, int k, std::uint64_t seed);

// ||M u|| <= ((l1 + l2)/2) alpha ||u|| for |M_ij| <= alpha.
OracleReport check_row_bound(int trials, int l1, int l2, double alpha,
                             std::uint64_t seed);

// ||[(A^T A - I) u]_Lambda|| <= mu (|Lambda| ||u_L|| + (pm/2) ||u_Lc||),
// |Lambda| < m. For p = 2 the (pm/2) factor equals the two-block bound m.
OracleReport check_offdiag_bound(int trials, int m, int p, int lam_size,
                                 std::uint64_t seed);

// Restricted-LS error bound on noiseless instances with K <= |Lambda| <
// 1/mu(A); infeasible draws are skipped and counted.
OracleReport check_ls_error_bound(int trials, int m, int p, int k,
                                  std::uint64_t seed);

// Enumerates supports of size 1..k_max (lexicographic, smallest size first)
// and returns the first restricted-LS solution with relative residual
// <= 1e-8; nullopt when nothing that sparse fits. Guarded to pm <= 24,
// k_max <= 3.
std::optional<Eigen::VectorXd> brute_force_sparsest(const BlockDictionary& a,
                                                    const Eigen::VectorXd& y,
                                                    int k_max);

}  // namespace saa::theory
