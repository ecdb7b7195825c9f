#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace saa {

// Blocks must reproduce the identity Gram to this max-abs tolerance.
inline constexpr double kOrthogonalityTol = 1e-10;

// Q from a QR factorization of a seeded m-by-m standard Gaussian matrix,
// with column signs chosen so the R diagonal is positive.
Eigen::MatrixXd make_orthogonal_block(std::uint64_t seed, int m);

// A = [Phi_1, ..., Phi_p] stored as p square orthogonal blocks; the dense
// m-by-pm matrix is never materialized. Immutable after construction and
// safe to share read-only across threads.
class BlockDictionary {
 public:
  explicit BlockDictionary(std::vector<Eigen::MatrixXd> blocks);

  // p independent seeded blocks; block i uses derive_seed(seed, 0x1000 + i).
  static BlockDictionary random(std::uint64_t seed, int m, int p);

  int block_dim() const { return m_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int cols() const { return m_ * block_count(); }

  const Eigen::MatrixXd& block(int i) const { return blocks_[i]; }

  // Column of the implicit dense matrix for a global index in [0, pm).
  Eigen::VectorXd column(int global_index) const;

  // y = A x = sum_i Phi_i x_i, never forming A.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  // A^T v = (Phi_1^T v, ..., Phi_p^T v).
  Eigen::VectorXd adjoint(const Eigen::VectorXd& v) const;

  // Largest |a_i^T a_j| over distinct columns. Within-block pairs vanish by
  // orthogonality, so this is the max entry over the cross Grams Phi_i^T Phi_j.
  double mutual_coherence() const;

 private:
  std::vector<Eigen::MatrixXd> blocks_;
  int m_ = 0;
};

}  // namespace saa
