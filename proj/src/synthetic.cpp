#include "saa/synthetic.hpp"

#include <stdexcept>
#include <string>

#include "saa/rng.hpp"

namespace saa {

Eigen::VectorXd gen_sparse_vector(std::uint64_t seed, int n, int k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("gen_sparse_vector: need 0 <= K <= n");
  }
  Rng rng(seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i : rng.sample_subset(n, k)) x[i] = rng.gaussian_nonzero();
  return x;
}

Instance gen_instance(const InstanceSpec& spec) {
  if (spec.sparsity < 0 || spec.sparsity > spec.m * spec.p) {
    throw std::invalid_argument("gen_instance: need 0 <= K <= pm");
  }
  if (spec.noise_level < 0.0) {
    throw std::invalid_argument("gen_instance: noise level must be >= 0");
  }
  BlockDictionary a = BlockDictionary::random(spec.seed, spec.m, spec.p);
  Eigen::VectorXd x_star = gen_sparse_vector(
      derive_seed(spec.seed, kStreamSparseVector), spec.m * spec.p,
      spec.sparsity);
  Eigen::VectorXd y = a.apply(x_star);
  if (spec.noise_level > 0.0) {
    Rng noise_rng(derive_seed(spec.seed, kStreamNoise));
    for (int i = 0; i < spec.m; ++i) {
      y[i] += spec.noise_level * noise_rng.gaussian();
    }
  }
  return Instance{std::move(a), std::move(x_star), std::move(y)};
}

bool recovery_success(const Eigen::VectorXd& x_hat,
                      const Eigen::VectorXd& x_star, double tol) {
  const double truth_norm = x_star.norm();
  if (!(truth_norm > 0.0)) {
    throw std::invalid_argument("recovery_success: x_star must be nonzero");
  }
  return (x_hat - x_star).norm() / truth_norm <= tol;
}

}  // namespace saa
