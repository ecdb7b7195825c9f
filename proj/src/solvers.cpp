#include "saa/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "saa/errors.hpp"

namespace saa {

namespace {

int count_nonzeros(const Eigen::VectorXd& x) {
  int nnz = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) ++nnz;
  }
  return nnz;
}

IndexSet support_of(const Eigen::VectorXd& x) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) idx.push_back(static_cast<int>(i));
  }
  return IndexSet::from_sorted(std::move(idx));
}

double block_max_error(const Eigen::VectorXd& diff, int m) {
  double worst = 0.0;
  for (Eigen::Index off = 0; off < diff.size(); off += m) {
    worst = std::max(worst, diff.segment(off, m).norm());
  }
  return worst;
}

// Applies the stopping rules in their fixed priority (residual first, then
// iterate change, then iteration budget) and records the optional trace.
class IterationMonitor {
 public:
  IterationMonitor(const BlockDictionary& a, const Eigen::VectorXd& y,
                   const SolverConfig& cfg, const Eigen::VectorXd* truth)
      : a_(a), y_(y), cfg_(cfg), truth_(truth) {}

  // Residual check on the initial point, before any step.
  std::optional<StopReason> initial(const Eigen::VectorXd& x) {
    prev_ = x;
    if ((y_ - a_.apply(x)).norm() <= cfg_.residual_tol) {
      return StopReason::Residual;
    }
    return std::nullopt;
  }

  std::optional<StopReason> after(const Eigen::VectorXd& x) {
    ++iterations_;
    const double residual = (y_ - a_.apply(x)).norm();
    if (cfg_.record_trace) {
      TraceEntry entry;
      entry.residual_norm = residual;
      entry.nnz = count_nonzeros(x);
      if (truth_ != nullptr) {
        const Eigen::VectorXd diff = x - *truth_;
        entry.error_to_truth = diff.norm();
        entry.error_to_truth_block_max = block_max_error(diff, a_.block_dim());
      }
      trace_.push_back(entry);
    }
    const double step_norm = (x - prev_).norm();
    const double x_norm = x.norm();
    prev_ = x;
    if (residual <= cfg_.residual_tol) return StopReason::Residual;
    // The relative-change rule only applies to a nonzero iterate.
    if (x_norm > 0.0 && step_norm / x_norm <= cfg_.iterate_tol) {
      return StopReason::IterateChange;
    }
    if (iterations_ >= cfg_.max_iters) return StopReason::MaxIters;
    return std::nullopt;
  }

  SolveResult finish(Eigen::VectorXd x, StopReason reason) {
    SolveResult result;
    result.final_residual = (y_ - a_.apply(x)).norm();
    result.x_hat = std::move(x);
    result.iterations = iterations_;
    result.stop_reason = reason;
    result.trace = std::move(trace_);
    return result;
  }

  int iterations() const { return iterations_; }

 private:
  const BlockDictionary& a_;
  const Eigen::VectorXd& y_;
  const SolverConfig& cfg_;
  const Eigen::VectorXd* truth_;
  Eigen::VectorXd prev_;
  std::vector<TraceEntry> trace_;
  int iterations_ = 0;
};

void require_measurement(const BlockDictionary& a, const Eigen::VectorXd& y) {
  if (y.size() != a.block_dim()) {
    throw std::invalid_argument("solver: y must have length " +
                                std::to_string(a.block_dim()));
  }
  if (!y.allFinite()) {
    throw std::invalid_argument("solver: y contains non-finite entries");
  }
}

void require_sparsity_fits(const BlockDictionary& a, const SolverConfig& cfg) {
  if (cfg.sparsity > a.cols()) {
    throw std::invalid_argument("solver: K exceeds the dictionary width");
  }
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double t) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    out[i] = v > t ? v - t : (v < -t ? v + t : 0.0);
  }
  return out;
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Tsaa: return "TSAA";
    case SolverKind::Msaa: return "MSAA";
    case SolverKind::Iht: return "IHT";
    case SolverKind::Htp: return "HTP";
    case SolverKind::Sp: return "SP";
    case SolverKind::Cosamp: return "CoSaMP";
    case SolverKind::Omp: return "OMP";
    case SolverKind::Fista: return "FISTA";
  }
  throw std::invalid_argument("unknown solver kind");
}

SolverKind parse_solver_kind(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "tsaa") return SolverKind::Tsaa;
  if (lower == "msaa") return SolverKind::Msaa;
  if (lower == "iht") return SolverKind::Iht;
  if (lower == "htp") return SolverKind::Htp;
  if (lower == "sp") return SolverKind::Sp;
  if (lower == "cosamp") return SolverKind::Cosamp;
  if (lower == "omp") return SolverKind::Omp;
  if (lower == "fista") return SolverKind::Fista;
  throw std::invalid_argument("unknown solver kind: " + name);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Residual: return "residual";
    case StopReason::IterateChange: return "iterate-change";
    case StopReason::MaxIters: return "max-iters";
  }
  throw std::invalid_argument("unknown stop reason");
}

void SolverConfig::validate() const {
  if (sparsity < 0) {
    throw std::invalid_argument("SolverConfig: K must be nonnegative");
  }
  const int t = effective_tau();
  if (t < sparsity || t > 2 * sparsity) {
    throw std::invalid_argument("SolverConfig: tau must satisfy K <= tau <= 2K");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  }
  if (residual_tol < 0.0 || iterate_tol < 0.0) {
    throw std::invalid_argument("SolverConfig: tolerances must be >= 0");
  }
}

IndexSet candidate_support(const Eigen::VectorXd& x_tilde,
                           const Eigen::VectorXd& gradient, int k, int tau) {
  if (tau < k || tau > 2 * k) {
    throw std::invalid_argument("candidate_support: need K <= tau <= 2K");
  }
  IndexSet lambda = top_k_indices(x_tilde, tau);
  const int rest = 2 * k - tau;
  if (rest > 0) {
    if (gradient.size() != x_tilde.size()) {
      throw std::invalid_argument(
          "candidate_support: gradient length mismatch");
    }
    lambda = lambda.unite(top_k_indices(gradient, rest));
  }
  return lambda;
}

// ---------------------------------------------------------------------------
// TSAA
// ---------------------------------------------------------------------------

SolverState tsaa_init(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const Eigen::VectorXd* x0, const Eigen::VectorXd* yb0) {
  require_measurement(a, y);
  SolverState state;
  state.x = x0 != nullptr ? *x0 : Eigen::VectorXd::Zero(a.cols());
  if (state.x.size() != a.cols()) {
    throw std::invalid_argument("tsaa_init: x0 must have length pm");
  }
  state.partition.push_back(yb0 != nullptr ? *yb0 : (y / 2.0).eval());
  if (state.partition[0].size() != a.block_dim()) {
    throw std::invalid_argument("tsaa_init: yb0 must have length m");
  }
  state.residual_norm = (y - a.apply(state.x)).norm();
  return state;
}

SolverState tsaa_step(SolverState state, const BlockDictionary& a,
                      const Eigen::VectorXd& y, const SolverConfig& cfg) {
  if (a.block_count() != 2) {
    throw std::invalid_argument("tsaa_step: TSAA needs exactly two blocks");
  }
  cfg.validate();
  const int m = a.block_dim();
  const int k = cfg.sparsity;
  const int tau = cfg.effective_tau();
  const Eigen::MatrixXd& phi_a = a.block(0);
  const Eigen::MatrixXd& phi_b = a.block(1);

  // S2: alternate between the two subsystems.
  const Eigen::VectorXd u_a = y - state.partition[0];
  const Eigen::VectorXd xa_tilde = hard_threshold(phi_a.transpose() * u_a, k);
  const Eigen::VectorXd u_b = y - phi_a * xa_tilde;
  const Eigen::VectorXd xb_tilde = hard_threshold(phi_b.transpose() * u_b, k);
  Eigen::VectorXd x_tilde(2 * m);
  x_tilde << xa_tilde, xb_tilde;

  // S3: loose shrink plus gradient indices, then projection on Lambda.
  Eigen::VectorXd gradient;
  if (2 * k - tau > 0) gradient = a.adjoint(y - a.apply(state.x));
  else gradient = Eigen::VectorXd::Zero(2 * m);
  const IndexSet lambda = candidate_support(x_tilde, gradient, k, tau);
  const Eigen::VectorXd x_hat = restricted_least_squares(a, y, lambda);

  // S4: K-sparse shrink, projection, partition update.
  const IndexSet s = top_k_indices(x_hat, k);
  Eigen::VectorXd x_next = restricted_least_squares(a, y, s);
  state.partition[0].noalias() = phi_b * x_next.segment(m, m);
  state.x = std::move(x_next);
  state.iteration += 1;
  state.residual_norm = (y - a.apply(state.x)).norm();
  return state;
}

SolveResult tsaa_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                       const SolverConfig& cfg, const Eigen::VectorXd* x0,
                       const Eigen::VectorXd* yb0,
                       const Eigen::VectorXd* truth) {
  if (a.block_count() != 2) {
    throw std::invalid_argument("tsaa_solve: TSAA needs exactly two blocks");
  }
  cfg.validate();
  require_sparsity_fits(a, cfg);
  SolverState state = tsaa_init(a, y, x0, yb0);
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(state.x)) {
    return monitor.finish(std::move(state.x), *reason);
  }
  while (true) {
    state = tsaa_step(std::move(state), a, y, cfg);
    if (auto reason = monitor.after(state.x)) {
      return monitor.finish(std::move(state.x), *reason);
    }
  }
}

// ---------------------------------------------------------------------------
// MSAA
// ---------------------------------------------------------------------------

SolverState msaa_init(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const Eigen::VectorXd* x0,
                      const std::vector<Eigen::VectorXd>* partition0) {
  require_measurement(a, y);
  const int p = a.block_count();
  SolverState state;
  state.x = x0 != nullptr ? *x0 : Eigen::VectorXd::Zero(a.cols());
  if (state.x.size() != a.cols()) {
    throw std::invalid_argument("msaa_init: x0 must have length pm");
  }
  if (partition0 != nullptr) {
    if (static_cast<int>(partition0->size()) != p - 1) {
      throw std::invalid_argument("msaa_init: need p-1 initial partitions");
    }
    for (const auto& v : *partition0) {
      if (v.size() != a.block_dim()) {
        throw std::invalid_argument("msaa_init: partition vectors need length m");
      }
    }
    state.partition = *partition0;
  } else {
    state.partition.assign(p - 1, (y / static_cast<double>(p)).eval());
  }
  state.residual_norm = (y - a.apply(state.x)).norm();
  return state;
}

SolverState msaa_step(SolverState state, const BlockDictionary& a,
                      const Eigen::VectorXd& y, const SolverConfig& cfg) {
  const int p = a.block_count();
  if (p <= 2) {
    throw std::invalid_argument("msaa_step: MSAA needs more than two blocks");
  }
  cfg.validate();
  const int m = a.block_dim();
  const int k = cfg.sparsity;
  const int tau = cfg.effective_tau();

  // S2: sequential sweep. u_1 = y - sum_{j>=2} y_j, then
  // u_{i+1} = u_i - ytilde_i + y_{i+1}.
  Eigen::VectorXd u = y;
  for (int j = 1; j < p; ++j) u -= state.partition[j - 1];
  Eigen::VectorXd x_tilde(p * m);
  for (int i = 0; i < p - 1; ++i) {
    const Eigen::VectorXd xi = hard_threshold(a.block(i).transpose() * u, k);
    x_tilde.segment(i * m, m) = xi;
    u.noalias() -= a.block(i) * xi;
    u += state.partition[i];
  }
  x_tilde.segment((p - 1) * m, m) =
      hard_threshold(a.block(p - 1).transpose() * u, k);

  // S3 / S4 as in the two-block case, over pm coordinates.
  Eigen::VectorXd gradient;
  if (2 * k - tau > 0) gradient = a.adjoint(y - a.apply(state.x));
  else gradient = Eigen::VectorXd::Zero(p * m);
  const IndexSet lambda = candidate_support(x_tilde, gradient, k, tau);
  const Eigen::VectorXd x_hat = restricted_least_squares(a, y, lambda);
  const IndexSet s = top_k_indices(x_hat, k);
  Eigen::VectorXd x_next = restricted_least_squares(a, y, s);
  for (int i = 1; i < p; ++i) {
    state.partition[i - 1].noalias() = a.block(i) * x_next.segment(i * m, m);
  }
  state.x = std::move(x_next);
  state.iteration += 1;
  state.residual_norm = (y - a.apply(state.x)).norm();
  return state;
}

SolveResult msaa_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                       const SolverConfig& cfg, const Eigen::VectorXd* x0,
                       const std::vector<Eigen::VectorXd>* partition0,
                       const Eigen::VectorXd* truth) {
  if (a.block_count() <= 2) {
    throw std::invalid_argument("msaa_solve: MSAA needs more than two blocks");
  }
  cfg.validate();
  require_sparsity_fits(a, cfg);
  SolverState state = msaa_init(a, y, x0, partition0);
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(state.x)) {
    return monitor.finish(std::move(state.x), *reason);
  }
  while (true) {
    state = msaa_step(std::move(state), a, y, cfg);
    if (auto reason = monitor.after(state.x)) {
      return monitor.finish(std::move(state.x), *reason);
    }
  }
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

namespace {

SolveResult iht_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const SolverConfig& cfg, const Eigen::VectorXd* truth) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(x)) return monitor.finish(std::move(x), *reason);
  while (true) {
    x = hard_threshold(x + a.adjoint(y - a.apply(x)), cfg.sparsity);
    if (auto reason = monitor.after(x)) return monitor.finish(std::move(x), *reason);
  }
}

SolveResult htp_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const SolverConfig& cfg, const Eigen::VectorXd* truth) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(x)) return monitor.finish(std::move(x), *reason);
  while (true) {
    const Eigen::VectorXd g = x + a.adjoint(y - a.apply(x));
    x = restricted_least_squares(a, y, top_k_indices(g, cfg.sparsity));
    if (auto reason = monitor.after(x)) return monitor.finish(std::move(x), *reason);
  }
}

SolveResult sp_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                     const SolverConfig& cfg, const Eigen::VectorXd* truth) {
  const int k = cfg.sparsity;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(x)) return monitor.finish(std::move(x), *reason);
  while (true) {
    const Eigen::VectorXd proxy = a.adjoint(y - a.apply(x));
    const IndexSet merged = support_of(x).unite(top_k_indices(proxy, k));
    const Eigen::VectorXd b = restricted_least_squares(a, y, merged);
    x = restricted_least_squares(a, y, top_k_indices(b, k));
    if (auto reason = monitor.after(x)) return monitor.finish(std::move(x), *reason);
  }
}

SolveResult cosamp_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                         const SolverConfig& cfg, const Eigen::VectorXd* truth) {
  const int k = cfg.sparsity;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(x)) return monitor.finish(std::move(x), *reason);
  while (true) {
    const Eigen::VectorXd proxy = a.adjoint(y - a.apply(x));
    const IndexSet merged = support_of(x).unite(top_k_indices(proxy, 2 * k));
    const Eigen::VectorXd b = restricted_least_squares(a, y, merged);
    x = hard_threshold(b, k);
    if (auto reason = monitor.after(x)) return monitor.finish(std::move(x), *reason);
  }
}

SolveResult omp_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                      const SolverConfig& cfg, const Eigen::VectorXd* truth) {
  const int k = cfg.sparsity;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(x)) return monitor.finish(std::move(x), *reason);
  std::vector<char> chosen(a.cols(), 0);
  std::vector<int> support;
  StopReason reason = StopReason::MaxIters;
  // Exactly K greedy selections, each followed by a restricted projection.
  for (int t = 0; t < k; ++t) {
    const Eigen::VectorXd proxy = a.adjoint(y - a.apply(x));
    int best = -1;
    double best_mag = -1.0;
    for (int i = 0; i < proxy.size(); ++i) {
      if (chosen[i]) continue;
      const double mag = std::abs(proxy[i]);
      if (mag > best_mag) {  // strict: magnitude ties keep the smaller index
        best_mag = mag;
        best = i;
      }
    }
    chosen[best] = 1;
    support.push_back(best);
    x = restricted_least_squares(a, y, IndexSet::from_unsorted(support));
    if (auto r = monitor.after(x)) {
      reason = *r;
      break;
    }
  }
  // K = 0 never enters the loop; the zero vector is the answer.
  return monitor.finish(std::move(x), reason);
}

SolveResult fista_solve(const BlockDictionary& a, const Eigen::VectorXd& y,
                        const SolverConfig& cfg, const Eigen::VectorXd* truth) {
  // Lipschitz constant of the smooth part: lambda_max(A^T A) = p exactly,
  // since A A^T = p I for concatenated orthogonal blocks.
  const double lip = static_cast<double>(a.block_count());
  const double shrink = cfg.fista_lambda / (2.0 * lip);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  Eigen::VectorXd w = x;
  double t = 1.0;
  IterationMonitor monitor(a, y, cfg, truth);
  if (auto reason = monitor.initial(x)) return monitor.finish(std::move(x), *reason);
  while (true) {
    const Eigen::VectorXd g = w - (1.0 / lip) * a.adjoint(a.apply(w) - y);
    Eigen::VectorXd x_next = soft_threshold(g, shrink);
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    w = x_next + ((t - 1.0) / t_next) * (x_next - x);
    t = t_next;
    x = std::move(x_next);
    if (auto reason = monitor.after(x)) {
      // The iterate is only soft-sparse; the reported solution is its best
      // K-term approximation.
      Eigen::VectorXd x_hat = hard_threshold(x, cfg.sparsity);
      return monitor.finish(std::move(x_hat), *reason);
    }
  }
}

}  // namespace

SolveResult baseline_solve(SolverKind kind, const BlockDictionary& a,
                           const Eigen::VectorXd& y, const SolverConfig& cfg,
                           const Eigen::VectorXd* truth) {
  cfg.validate();
  require_measurement(a, y);
  require_sparsity_fits(a, cfg);
  switch (kind) {
    case SolverKind::Iht: return iht_solve(a, y, cfg, truth);
    case SolverKind::Htp: return htp_solve(a, y, cfg, truth);
    case SolverKind::Sp: return sp_solve(a, y, cfg, truth);
    case SolverKind::Cosamp: return cosamp_solve(a, y, cfg, truth);
    case SolverKind::Omp: return omp_solve(a, y, cfg, truth);
    case SolverKind::Fista: return fista_solve(a, y, cfg, truth);
    case SolverKind::Tsaa:
    case SolverKind::Msaa:
      throw std::invalid_argument("baseline_solve: use tsaa_solve/msaa_solve");
  }
  throw std::invalid_argument("baseline_solve: unknown solver kind");
}

SolveResult solve(SolverKind kind, const BlockDictionary& a,
                  const Eigen::VectorXd& y, const SolverConfig& cfg,
                  const Eigen::VectorXd* truth) {
  switch (kind) {
    case SolverKind::Tsaa:
      return tsaa_solve(a, y, cfg, nullptr, nullptr, truth);
    case SolverKind::Msaa:
      return msaa_solve(a, y, cfg, nullptr, nullptr, truth);
    default:
      return baseline_solve(kind, a, y, cfg, truth);
  }
}

}  // namespace saa
