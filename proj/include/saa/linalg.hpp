#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "saa/block_dictionary.hpp"

namespace saa {

// Relative R-diagonal threshold below which a column submatrix is treated
// as rank-deficient (minimum-norm solution returned).
inline constexpr double kRankRelTol = 1e-12;

// Normal-equation residual bound: ||A_S^T (y - A x)||_inf <= tol * ||y||_2.
inline constexpr double kNormalEqRelTol = 1e-9;

// Sorted duplicate-free subset of {0, ..., n-1}.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<int> init);

  static IndexSet from_sorted(std::vector<int> indices);    // validates
  static IndexSet from_unsorted(std::vector<int> indices);  // sorts + dedups

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  const std::vector<int>& values() const { return indices_; }

  bool contains(int index) const;
  IndexSet unite(const IndexSet& other) const;
  bool operator==(const IndexSet& other) const = default;

 private:
  std::vector<int> indices_;
};

// Indices of the K largest-magnitude entries; magnitude ties go to the
// smaller index. Result sorted ascending, size exactly min(K, n).
IndexSet top_k_indices(const Eigen::VectorXd& x, int k);

// x restricted to top_k_indices(x, K), zeros elsewhere.
Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, int k);

// argmin { ||y - A x||_2 : supp(x) in support }, via QR of the gathered
// column submatrix. A numerically rank-deficient submatrix (R diagonal
// below kRankRelTol relatively) falls back to the minimum-norm solution.
// |support| > m is rejected: the projection is ill-posed.
Eigen::VectorXd restricted_least_squares(const BlockDictionary& a,
                                         const Eigen::VectorXd& y,
                                         const IndexSet& support);

}  // namespace saa
