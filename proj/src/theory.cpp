#include "saa/theory.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "saa/linalg.hpp"
#include "saa/rng.hpp"

namespace saa::theory {

namespace {

void require_positive_mu(double mu) {
  if (!(mu > 0.0)) {
    throw std::invalid_argument("theory: mu must be positive");
  }
}

void require_p(int p) {
  if (p < 2) throw std::invalid_argument("theory: p must be >= 2");
}

}  // namespace

double tau1(int p) {
  require_p(p);
  const double sp = std::sqrt(static_cast<double>(p));
  return 2.0 / (kOmega * (1.0 + 2.0 * kOmega * kOmega * (3.0 * p - 2.0) * sp));
}

double tau2(int p, bool statement_variant) {
  require_p(p);
  const double t1 = tau1(p);
  const double shrink = statement_variant ? (1.0 - 3.0 * t1) : (1.0 - 2.0 * t1);
  const double sp = std::sqrt(static_cast<double>(p));
  return 2.0 * (2.0 - kOmega * t1) * shrink * shrink /
         (kOmega3 * (3.0 * p - 2.0) * p * p * sp);
}

double uniqueness_bound(double mu) {
  if (!(mu > 0.0) || mu > 1.0) {
    throw std::invalid_argument("uniqueness_bound: mu must lie in (0, 1]");
  }
  return 0.5 * (1.0 + 1.0 / mu);
}

double tsaa_condition_rhs(double mu, int m) {
  require_positive_mu(mu);
  const double second = kC * (1.0 - kC) * (1.0 - kC) /
                        (static_cast<double>(m) * m * mu * mu);
  return (1.0 / (2.0 * mu)) * std::min(kC, second);
}

double tsaa_contraction_ratio(int k, double mu, int m) {
  require_positive_mu(mu);
  if (k < 0) throw std::invalid_argument("tsaa_contraction_ratio: K >= 0");
  if (k == 0) return 0.0;
  const double kmu = k * mu;
  if (2.0 * kmu >= 1.0) {
    throw std::invalid_argument(
        "tsaa_contraction_ratio: undefined ratio, needs 2 K mu < 1");
  }
  const double mmu = m * mu;
  const double b1 = 1.0 + std::pow(mmu / (1.0 - kmu), 2);
  const double b2 = 1.0 + std::pow(mmu / (1.0 - 2.0 * kmu), 2);
  const double b3 = 1.0 + std::pow(1.5 * k * kOmega * mu, 2);
  return 1.5 * k * kOmega3 * mu * std::sqrt(b1 * b2 * b3);
}

double msaa_condition_rhs(double mu, int m, int p) {
  require_positive_mu(mu);
  require_p(p);
  const double second =
      tau2(p) / (static_cast<double>(m) * m * mu * mu);
  return (1.0 / mu) * std::min(tau1(p), second);
}

double msaa_contraction_ratio(int k, double mu, int m, int p,
                              bool statement_variant) {
  require_positive_mu(mu);
  require_p(p);
  if (k < 0) throw std::invalid_argument("msaa_contraction_ratio: K >= 0");
  if (k == 0) return 0.0;
  const double kmu = k * mu;
  const double first_denom =
      statement_variant ? (1.0 - 3.0 * kmu) : (1.0 - 2.0 * kmu);
  if (first_denom <= 0.0 || 1.0 - kmu <= 0.0 || 2.0 - kOmega * kmu <= 0.0) {
    throw std::invalid_argument(
        "msaa_contraction_ratio: undefined ratio, nonpositive denominator");
  }
  const double pm_mu = p * static_cast<double>(m) * mu;
  const double b1 = 1.0 + std::pow(pm_mu / (2.0 * first_denom), 2);
  const double b2 = 1.0 + std::pow(pm_mu / (2.0 * (1.0 - kmu)), 2);
  const double sp = std::sqrt(static_cast<double>(p));
  return kOmega3 * kmu * (3.0 * p - 2.0) * sp / (2.0 - kOmega * kmu) *
         std::sqrt(b1 * b2);
}

bool check_tsaa_condition(double mu, int m, int k) {
  return static_cast<double>(k) < tsaa_condition_rhs(mu, m);
}

bool check_msaa_condition(double mu, int m, int p, int k) {
  return static_cast<double>(k) < msaa_condition_rhs(mu, m, p);
}

BoundReport evaluate_bounds(double mu, int m, int p, int k) {
  require_positive_mu(mu);
  require_p(p);
  BoundReport report;
  report.mu = mu;
  report.m = m;
  report.p = p;
  report.k = k;
  report.uniqueness_bound = uniqueness_bound(std::min(mu, 1.0));
  if (p == 2) {
    report.condition_rhs = tsaa_condition_rhs(mu, m);
    report.condition_holds = k < report.condition_rhs;
    if (2.0 * k * mu < 1.0) report.rho = tsaa_contraction_ratio(k, mu, m);
  } else {
    report.condition_rhs = msaa_condition_rhs(mu, m, p);
    report.condition_holds = k < report.condition_rhs;
    if (2.0 * k * mu < 1.0 && kOmega * k * mu < 2.0) {
      report.eta = msaa_contraction_ratio(k, mu, m, p);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Randomized lemma oracles
// ---------------------------------------------------------------------------

namespace {

// slack absorbs floating-point noise in degenerate cases where both sides
// vanish in exact arithmetic (e.g. supp(x*) inside Lambda).
void track(OracleReport& report, double lhs, double rhs, double slack = 0.0) {
  if (rhs > 0.0) {
    report.max_ratio = std::max(report.max_ratio, lhs / rhs);
  }
  if (lhs > rhs + slack) ++report.violations;
}

Eigen::VectorXd random_gaussian(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

OracleReport check_hk_bound(int trials, int n, int k, std::uint64_t seed) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("check_hk_bound: need 0 <= K <= n");
  }
  OracleReport report;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd z = random_gaussian(rng, n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i : rng.sample_subset(n, k)) x[i] = rng.gaussian_nonzero();

    const IndexSet s_star = top_k_indices(z, k);
    const Eigen::VectorXd hk = hard_threshold(z, k);
    const double lhs = (x - hk).norm();
    double restricted_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x[i] != 0.0 || s_star.contains(i)) {
        restricted_sq += (x[i] - z[i]) * (x[i] - z[i]);
      }
    }
    track(report, lhs, kOmega * std::sqrt(restricted_sq));
    ++report.trials;
  }
  return report;
}

OracleReport check_row_bound(int trials, int l1, int l2, double alpha,
                             std::uint64_t seed) {
  if (l1 < 1 || l2 < 1 || !(alpha > 0.0)) {
    throw std::invalid_argument("check_row_bound: need l1, l2 >= 1, alpha > 0");
  }
  OracleReport report;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd mat(l1, l2);
    for (int j = 0; j < l2; ++j) {
      for (int i = 0; i < l1; ++i) mat(i, j) = alpha * (2.0 * rng.uniform() - 1.0);
    }
    const Eigen::VectorXd u = random_gaussian(rng, l2);
    track(report, (mat * u).norm(), 0.5 * (l1 + l2) * alpha * u.norm());
    ++report.trials;
  }
  return report;
}

OracleReport check_offdiag_bound(int trials, int m, int p, int lam_size,
                                 std::uint64_t seed) {
  if (lam_size < 0 || lam_size >= m) {
    throw std::invalid_argument("check_offdiag_bound: need 0 <= |Lambda| < m");
  }
  OracleReport report;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const BlockDictionary a = BlockDictionary::random(rng.bits(), m, p);
    const double mu = a.mutual_coherence();
    const int n = a.cols();
    const Eigen::VectorXd u = random_gaussian(rng, n);
    const std::vector<int> lam = rng.sample_subset(n, lam_size);

    const Eigen::VectorXd v = a.adjoint(a.apply(u)) - u;  // (A^T A - I) u
    double lhs_sq = 0.0;
    double u_lam_sq = 0.0;
    for (int i : lam) {
      lhs_sq += v[i] * v[i];
      u_lam_sq += u[i] * u[i];
    }
    const double u_comp = std::sqrt(std::max(0.0, u.squaredNorm() - u_lam_sq));
    const double rhs =
        mu * (lam_size * std::sqrt(u_lam_sq) + 0.5 * p * m * u_comp);
    track(report, std::sqrt(lhs_sq), rhs);
    ++report.trials;
  }
  return report;
}

OracleReport check_ls_error_bound(int trials, int m, int p, int k,
                                  std::uint64_t seed) {
  if (k < 1 || k > m) {
    throw std::invalid_argument("check_ls_error_bound: need 1 <= K <= m");
  }
  OracleReport report;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    ++report.trials;
    const BlockDictionary a = BlockDictionary::random(rng.bits(), m, p);
    const double mu = a.mutual_coherence();
    const int n = a.cols();

    // Lemma hypotheses: K <= |Lambda| < 1/mu(A) and |Lambda| < m.
    int lam_cap = static_cast<int>(std::ceil(1.0 / mu)) - 1;
    while (lam_cap >= 1 && lam_cap * mu >= 1.0) --lam_cap;
    lam_cap = std::min(lam_cap, m - 1);
    if (static_cast<double>(k) * mu >= 1.0 || lam_cap < k) {
      ++report.skipped;
      continue;
    }
    const int lam_size = rng.uniform_int(k, lam_cap);

    Eigen::VectorXd x_star = Eigen::VectorXd::Zero(n);
    for (int i : rng.sample_subset(n, k)) x_star[i] = rng.gaussian_nonzero();
    const Eigen::VectorXd y = a.apply(x_star);
    const IndexSet lam = IndexSet::from_sorted(rng.sample_subset(n, lam_size));

    const Eigen::VectorXd z_plus = restricted_least_squares(a, y, lam);
    const Eigen::VectorXd diff = z_plus - x_star;
    double off_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!lam.contains(i)) off_sq += diff[i] * diff[i];
    }
    const double amp = 0.5 * p * m * mu / (1.0 - lam_size * mu);
    const double rhs = std::sqrt(1.0 + amp * amp) * std::sqrt(off_sq);
    track(report, diff.norm(), rhs, 1e-10 * x_star.norm());
  }
  return report;
}

std::optional<Eigen::VectorXd> brute_force_sparsest(const BlockDictionary& a,
                                                    const Eigen::VectorXd& y,
                                                    int k_max) {
  const int n = a.cols();
  if (n > 24 || k_max > 3) {
    throw std::invalid_argument(
        "brute_force_sparsest: enumeration guard (pm <= 24, Kmax <= 3)");
  }
  if (k_max < 1) {
    throw std::invalid_argument("brute_force_sparsest: Kmax must be >= 1");
  }
  const double y_norm = y.norm();
  std::vector<int> support;
  // Lexicographic enumeration at the current size; first fit wins.
  auto search = [&](auto&& self, int size, int next) -> std::optional<Eigen::VectorXd> {
    if (static_cast<int>(support.size()) == size) {
      Eigen::VectorXd x = restricted_least_squares(
          a, y, IndexSet::from_sorted(support));
      if ((y - a.apply(x)).norm() <= 1e-8 * y_norm) return x;
      return std::nullopt;
    }
    const int remaining = size - static_cast<int>(support.size());
    for (int i = next; i + remaining <= n; ++i) {
      support.push_back(i);
      if (auto hit = self(self, size, i + 1)) return hit;
      support.pop_back();
    }
    return std::nullopt;
  };
  for (int size = 1; size <= k_max; ++size) {
    if (auto hit = search(search, size, 0)) return hit;
  }
  return std::nullopt;
}

}  // namespace saa::theory
