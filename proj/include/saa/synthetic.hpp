#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "saa/block_dictionary.hpp"

namespace saa {

// Recovery criterion threshold: relative l2 error <= 1e-4.
inline constexpr double kRecoveryTol = 1e-4;

// Sub-stream tags under derive_seed(spec.seed, tag); blocks use
// 0x1000 + i inside BlockDictionary::random.
inline constexpr std::uint64_t kStreamSparseVector = 0x2000;
inline constexpr std::uint64_t kStreamNoise = 0x3000;

struct InstanceSpec {
  std::uint64_t seed = 0;
  int m = 0;
  int p = 0;
  int sparsity = 0;          // K
  double noise_level = 0.0;  // epsilon
};

struct Instance {
  BlockDictionary a;
  Eigen::VectorXd x_star;  // exactly K nonzeros
  Eigen::VectorXd y;       // A x_star + epsilon h
};

// Uniform random K-subset support filled with standard Gaussians; exact
// zeros are resampled so the support size is exactly K.
Eigen::VectorXd gen_sparse_vector(std::uint64_t seed, int n, int k);

// Pure function of spec: blocks, x_star, and noise come from independent
// derived sub-streams.
Instance gen_instance(const InstanceSpec& spec);

// ||x_hat - x_star|| / ||x_star|| <= tol; requires x_star != 0.
bool recovery_success(const Eigen::VectorXd& x_hat,
                      const Eigen::VectorXd& x_star,
                      double tol = kRecoveryTol);

}  // namespace saa
