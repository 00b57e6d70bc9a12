#pragma once

// Discrete operators on the box grid: signed incidence exterior derivatives,
// (weighted) mass matrices, codifferentials, and the two-sided bounds of a
// weight against the unweighted metric. All operators act on kept-cell
// vectors in enumeration order.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <string>

#include "derham/box_grid.hpp"
#include "derham/mass_matrix.hpp"

namespace derham {

// Material weight for the middle-degree metric. Scalar fields are sampled at
// cell barycenters; a constant SPD matrix acts on the binom(N, q) axis-subset
// components and couples co-located cells (the q-cells sharing a base vertex
// with all pinned coordinates strictly inside the index range).
struct EpsilonWeight {
  enum class Kind { identity, scalar_field, constant_spd };

  Kind kind = Kind::identity;
  std::function<double(const Eigen::VectorXd&)> field;  // used by scalar_field
  Eigen::MatrixXd matrix;                               // used by constant_spd
  std::string label = "identity";                       // for reports

  static EpsilonWeight identity();
  static EpsilonWeight scalar(double value);
  static EpsilonWeight scalar_field(std::function<double(const Eigen::VectorXd&)> f,
                                    std::string label);
  static EpsilonWeight constant_spd(Eigen::MatrixXd mat);
  bool is_identity() const { return kind == Kind::identity; }
};

struct EpsilonBounds {
  double under = 1.0;  // smallest Rayleigh quotient is under^{-2}
  double over = 1.0;   // largest Rayleigh quotient is over^2
  double hat = 1.0;    // max(under, over)
};

// Signed incidence matrix taking q-cochains to (q+1)-cochains; rows and
// columns are restricted to the cells kept under bc. Each face of a
// (q+1)-cell enters with sign (-1)^{position of the omitted axis in the
// cell's axis set}, far face positive, near face negative, which makes
// consecutive derivatives compose to zero exactly (also after restriction:
// every face of a boundary cell lies in the boundary).
Eigen::SparseMatrix<double> exterior_derivative(const BoxGrid& grid, int q,
                                                BoundaryCondition bc);

// Mass matrix of the degree-q metric. Identity weight gives exactly
// spacing^(N-2q) per cell (the L2 norm of the piecewise-constant proxy under
// midpoint quadrature); scalar fields scale each diagonal entry by the value
// at the cell barycenter; a constant SPD weight produces one small block per
// co-located cell group and plain diagonal entries (the weight's matching
// diagonal entry) for the leftover far-face cells.
MassMatrix mass_matrix(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                       BoundaryCondition bc);

// Codifferential on q-cochains, -M_{q-1}^{-1} D_{q-1}^T M_{q,eps}, returned
// as a sparse matrix from degree q to degree q-1. Against the unweighted
// metrics it is the negative adjoint of the exterior derivative:
// <D xi, zeta>_q = -<xi, delta zeta>_{q-1}.
Eigen::SparseMatrix<double> codifferential(const BoxGrid& grid, int q,
                                           const EpsilonWeight& eps, BoundaryCondition bc);

// Two-sided spectral bounds of the degree-q weighted mass against the
// unweighted one: under^{-2} <= x^T M_eps x / x^T M x <= over^2.
EpsilonBounds epsilon_bounds(const BoxGrid& grid, int q, const EpsilonWeight& eps);

// Plain-text sparse export, one "row col value" line per stored entry,
// row-major order.
void export_coordinate_text(const Eigen::SparseMatrix<double>& mat, std::ostream& os);

}  // namespace derham
