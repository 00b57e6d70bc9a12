#pragma once

// Symmetric positive definite mass matrices as they arise on structured
// grids: a diagonal plus a set of disjoint small dense SPD blocks. Supports
// the applications an eigensolver needs (M x, M^{-1} x, M^{+-1/2} x) without
// ever forming a large dense factor; blocks are eigendecomposed once.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace derham {

class MassMatrix {
 public:
  struct Block {
    std::vector<long> index;  // positions in the vector, pairwise disjoint
    Eigen::MatrixXd mat;      // small SPD block
  };

  MassMatrix() = default;
  static MassMatrix diagonal(Eigen::VectorXd diag);
  // diag supplies the entries for every position not covered by a block;
  // covered positions ignore their diag entry.
  static MassMatrix with_blocks(Eigen::VectorXd diag, std::vector<Block> blocks);

  long size() const { return diag_.size(); }
  bool is_diagonal() const { return blocks_.empty(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply_sqrt(const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve_sqrt(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd solve_sqrt(const Eigen::MatrixXd& x) const;

  // Smallest and largest eigenvalue over the diagonal part and all blocks.
  std::pair<double, double> eigenvalue_extremes() const;

  Eigen::SparseMatrix<double> to_sparse() const;

  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return x.dot(apply(y));
  }
  double norm(const Eigen::VectorXd& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

 private:
  void decompose_blocks();
  enum class Power { plus_one, minus_one, plus_half, minus_half };
  void apply_power(Eigen::Ref<Eigen::MatrixXd> x, Power p) const;

  Eigen::VectorXd diag_;
  std::vector<Block> blocks_;
  std::vector<bool> in_block_;
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> factors_;
};

}  // namespace derham
