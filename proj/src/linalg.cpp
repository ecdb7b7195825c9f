#include "saa/linalg.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace saa {

IndexSet::IndexSet(std::initializer_list<int> init) {
  *this = from_unsorted(std::vector<int>(init));
}

IndexSet IndexSet::from_sorted(std::vector<int> indices) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || (i > 0 && indices[i] <= indices[i - 1])) {
      throw std::invalid_argument(
          "IndexSet: indices must be nonnegative and strictly increasing");
    }
  }
  IndexSet s;
  s.indices_ = std::move(indices);
  return s;
}

IndexSet IndexSet::from_unsorted(std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return from_sorted(std::move(indices));
}

bool IndexSet::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

IndexSet IndexSet::unite(const IndexSet& other) const {
  std::vector<int> merged;
  merged.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(merged));
  IndexSet s;
  s.indices_ = std::move(merged);
  return s;
}

IndexSet top_k_indices(const Eigen::VectorXd& x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 0 || k > n) {
    throw std::invalid_argument("top_k_indices: K must lie in [0, " +
                                std::to_string(n) + "], got " +
                                std::to_string(k));
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const auto larger = [&x](int i, int j) {
    const double ai = std::abs(x[i]);
    const double aj = std::abs(x[j]);
    return ai > aj || (ai == aj && i < j);  // ties go to the smaller index
  };
  std::nth_element(idx.begin(), idx.begin() + k, idx.end(), larger);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return IndexSet::from_sorted(std::move(idx));
}

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& x, int k) {
  const IndexSet keep = top_k_indices(x, k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int i : keep) out[i] = x[i];
  return out;
}

Eigen::VectorXd restricted_least_squares(const BlockDictionary& a,
                                         const Eigen::VectorXd& y,
                                         const IndexSet& support) {
  const int m = a.block_dim();
  if (y.size() != m) {
    throw std::invalid_argument("restricted_least_squares: y must have length " +
                                std::to_string(m));
  }
  if (static_cast<int>(support.size()) > m) {
    throw std::invalid_argument(
        "restricted_least_squares: support wider than m (" +
        std::to_string(support.size()) + " > " + std::to_string(m) +
        "), projection ill-posed");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  if (support.empty()) return x;

  const int s = static_cast<int>(support.size());
  Eigen::MatrixXd cols(m, s);
  for (int i = 0; i < s; ++i) cols.col(i) = a.column(support[i]);

  // Fast path: unpivoted QR. Escalate to the rank-revealing minimum-norm
  // path when the R diagonal collapses or the normal equations disagree.
  Eigen::VectorXd coeffs;
  bool ok = false;
  {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s; ++i) {
      const double d = std::abs(qr.matrixQR()(i, i));
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    if (dmax > 0.0 && dmin >= kRankRelTol * dmax) {
      coeffs = qr.solve(y);
      const Eigen::VectorXd residual = y - cols * coeffs;
      ok = (cols.transpose() * residual).cwiseAbs().maxCoeff() <=
           kNormalEqRelTol * y.norm();
    }
  }
  if (!ok) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankRelTol);
    cod.compute(cols);
    coeffs = cod.solve(y);
  }
  for (int i = 0; i < s; ++i) x[support[i]] = coeffs[i];
  return x;
}

}  // namespace saa
