#include "saa/block_dictionary.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "saa/rng.hpp"

namespace saa {

namespace {
constexpr std::uint64_t kStreamBlockBase = 0x1000;
}

Eigen::MatrixXd make_orthogonal_block(std::uint64_t seed, int m) {
  if (m < 2) {
    throw std::invalid_argument("make_orthogonal_block: m must be >= 2, got " +
                                std::to_string(m));
  }
  Rng rng(seed);
  Eigen::MatrixXd g(m, m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m; ++r) g(r, c) = rng.gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& qrm = qr.matrixQR();
  for (int j = 0; j < m; ++j) {
    if (qrm(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

BlockDictionary::BlockDictionary(std::vector<Eigen::MatrixXd> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.size() < 2) {
    throw std::invalid_argument("BlockDictionary: need at least two blocks");
  }
  m_ = static_cast<int>(blocks_[0].rows());
  if (m_ < 2) {
    throw std::invalid_argument("BlockDictionary: block dimension must be >= 2");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != m_ || b.cols() != m_) {
      throw std::invalid_argument("BlockDictionary: blocks must all be " +
                                  std::to_string(m_) + "x" + std::to_string(m_));
    }
    const double dev = (b.transpose() * b - Eigen::MatrixXd::Identity(m_, m_))
                           .cwiseAbs()
                           .maxCoeff();
    if (!(dev <= kOrthogonalityTol)) {
      throw std::invalid_argument(
          "BlockDictionary: block is not orthogonal (max |Q^T Q - I| = " +
          std::to_string(dev) + ")");
    }
  }
}

BlockDictionary BlockDictionary::random(std::uint64_t seed, int m, int p) {
  if (p < 2) {
    throw std::invalid_argument("BlockDictionary::random: p must be >= 2");
  }
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(p);
  for (int i = 0; i < p; ++i) {
    blocks.push_back(make_orthogonal_block(derive_seed(seed, kStreamBlockBase + i), m));
  }
  return BlockDictionary(std::move(blocks));
}

Eigen::VectorXd BlockDictionary::column(int global_index) const {
  if (global_index < 0 || global_index >= cols()) {
    throw std::invalid_argument("BlockDictionary::column: index out of range");
  }
  return blocks_[global_index / m_].col(global_index % m_);
}

Eigen::VectorXd BlockDictionary::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) {
    throw std::invalid_argument("BlockDictionary::apply: expected length " +
                                std::to_string(cols()) + ", got " +
                                std::to_string(x.size()));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
  for (int i = 0; i < block_count(); ++i) {
    y.noalias() += blocks_[i] * x.segment(i * m_, m_);
  }
  return y;
}

Eigen::VectorXd BlockDictionary::adjoint(const Eigen::VectorXd& v) const {
  if (v.size() != m_) {
    throw std::invalid_argument("BlockDictionary::adjoint: expected length " +
                                std::to_string(m_) + ", got " +
                                std::to_string(v.size()));
  }
  Eigen::VectorXd out(cols());
  for (int i = 0; i < block_count(); ++i) {
    out.segment(i * m_, m_).noalias() = blocks_[i].transpose() * v;
  }
  return out;
}

double BlockDictionary::mutual_coherence() const {
  double mu = 0.0;
  for (int i = 0; i < block_count(); ++i) {
    for (int j = i + 1; j < block_count(); ++j) {
      const double pair_max =
          (blocks_[i].transpose() * blocks_[j]).cwiseAbs().maxCoeff();
      mu = std::max(mu, pair_max);
    }
  }
  return std::min(mu, 1.0);
}

}  // namespace saa
