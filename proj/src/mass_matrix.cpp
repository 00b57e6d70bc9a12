#include "derham/mass_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace derham {

MassMatrix MassMatrix::diagonal(Eigen::VectorXd diag) {
  if ((diag.array() <= 0.0).any())
    throw std::invalid_argument("MassMatrix: diagonal entries must be positive");
  MassMatrix m;
  m.diag_ = std::move(diag);
  m.in_block_.assign(static_cast<std::size_t>(m.diag_.size()), false);
  return m;
}

MassMatrix MassMatrix::with_blocks(Eigen::VectorXd diag, std::vector<Block> blocks) {
  MassMatrix m;
  m.diag_ = std::move(diag);
  m.blocks_ = std::move(blocks);
  m.in_block_.assign(static_cast<std::size_t>(m.diag_.size()), false);
  for (const auto& b : m.blocks_) {
    if (b.mat.rows() != b.mat.cols() ||
        b.mat.rows() != static_cast<Eigen::Index>(b.index.size()))
      throw std::invalid_argument("MassMatrix: block shape mismatch");
    for (long i : b.index) {
      if (i < 0 || i >= m.diag_.size() || m.in_block_[static_cast<std::size_t>(i)])
        throw std::invalid_argument("MassMatrix: block indices must be disjoint and in range");
      m.in_block_[static_cast<std::size_t>(i)] = true;
    }
  }
  for (long i = 0; i < m.diag_.size(); ++i)
    if (!m.in_block_[static_cast<std::size_t>(i)] && m.diag_[i] <= 0.0)
      throw std::invalid_argument("MassMatrix: diagonal entries must be positive");
  m.decompose_blocks();
  return m;
}

void MassMatrix::decompose_blocks() {
  factors_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    factors_.emplace_back(b.mat);
    if (factors_.back().info() != Eigen::Success ||
        factors_.back().eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("MassMatrix: block is not positive definite");
  }
}

void MassMatrix::apply_power(Eigen::Ref<Eigen::MatrixXd> x, Power p) const {
  for (long i = 0; i < diag_.size(); ++i) {
    if (in_block_[static_cast<std::size_t>(i)]) continue;
    double f = diag_[i];
    switch (p) {
      case Power::plus_one: break;
      case Power::minus_one: f = 1.0 / f; break;
      case Power::plus_half: f = std::sqrt(f); break;
      case Power::minus_half: f = 1.0 / std::sqrt(f); break;
    }
    x.row(i) *= f;
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& idx = blocks_[k].index;
    const auto& es = factors_[k];
    const auto nb = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd slab(nb, x.cols());
    for (Eigen::Index r = 0; r < nb; ++r) slab.row(r) = x.row(idx[static_cast<std::size_t>(r)]);
    Eigen::VectorXd ev = es.eigenvalues();
    switch (p) {
      case Power::plus_one: break;
      case Power::minus_one: ev = ev.cwiseInverse(); break;
      case Power::plus_half: ev = ev.cwiseSqrt(); break;
      case Power::minus_half: ev = ev.cwiseSqrt().cwiseInverse(); break;
    }
    slab = es.eigenvectors() * ev.asDiagonal() * (es.eigenvectors().transpose() * slab);
    for (Eigen::Index r = 0; r < nb; ++r) x.row(idx[static_cast<std::size_t>(r)]) = slab.row(r);
  }
}

Eigen::VectorXd MassMatrix::apply(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::plus_one);
  return y.col(0);
}

Eigen::MatrixXd MassMatrix::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::plus_one);
  return y;
}

Eigen::VectorXd MassMatrix::solve(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::minus_one);
  return y.col(0);
}

Eigen::MatrixXd MassMatrix::solve(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::minus_one);
  return y;
}

Eigen::VectorXd MassMatrix::apply_sqrt(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::plus_half);
  return y.col(0);
}

Eigen::VectorXd MassMatrix::solve_sqrt(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::minus_half);
  return y.col(0);
}

Eigen::MatrixXd MassMatrix::solve_sqrt(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = x;
  apply_power(y, Power::minus_half);
  return y;
}

std::pair<double, double> MassMatrix::eigenvalue_extremes() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < diag_.size(); ++i) {
    if (in_block_[static_cast<std::size_t>(i)]) continue;
    lo = std::min(lo, diag_[i]);
    hi = std::max(hi, diag_[i]);
  }
  for (const auto& es : factors_) {
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  return {lo, hi};
}

Eigen::SparseMatrix<double> MassMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(diag_.size()));
  for (long i = 0; i < diag_.size(); ++i)
    if (!in_block_[static_cast<std::size_t>(i)])
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), diag_[i]);
  for (const auto& b : blocks_) {
    const auto nb = static_cast<Eigen::Index>(b.index.size());
    for (Eigen::Index r = 0; r < nb; ++r)
      for (Eigen::Index c = 0; c < nb; ++c)
        trip.emplace_back(static_cast<int>(b.index[static_cast<std::size_t>(r)]),
                          static_cast<int>(b.index[static_cast<std::size_t>(c)]), b.mat(r, c));
  }
  Eigen::SparseMatrix<double> s(diag_.size(), diag_.size());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

}  // namespace derham
