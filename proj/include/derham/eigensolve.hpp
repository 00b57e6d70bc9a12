#pragma once

// Solvers for the symmetric generalized eigenvalue problem K x = lambda M x
// with K sparse positive semidefinite and M an SPD mass matrix:
//  - dense_solve whitens with M^(-1/2) and computes the full spectrum,
//  - smallest_nonzero runs a blocked, preconditioned LOBPCG iteration with
//    explicit deflation of a known kernel basis,
//  - richardson_extrapolate removes the leading h^2 error from a sequence of
//    values computed on successively halved grids.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

#include "derham/mass_matrix.hpp"

namespace derham {

struct SymmetricPencil {
  Eigen::SparseMatrix<double> k;  // symmetric, positive semidefinite
  MassMatrix m;                   // symmetric positive definite
};

struct EigOptions {
  double tol = 1e-9;          // relative residual target per eigenpair
  int max_iter = 2000;        // LOBPCG iterations
  int block_size = 6;         // subspace block width
  std::uint64_t seed = 0x2545f4914f6cdd1dULL;  // initial block
  double kernel_rel_tol = 1e-10;  // zero/nonzero classification threshold
};

struct EigResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXd vectors;   // matching columns, M-orthonormal (may be empty)
  Eigen::VectorXd residuals; // ||K v - lambda M v|| / max(lambda ||M v||, tiny)
  long kernel_dim = 0;       // zero eigenvalues seen (dense) or deflated (iterative)
  bool kernel_mismatch = false;
  bool converged = true;
  int iterations = 0;
};

// Full spectrum via M^(-1/2) K M^(-1/2); throws above 5000 unknowns.
// kernel_dim counts eigenvalues below kernel_rel_tol times the largest.
EigResult dense_solve(const SymmetricPencil& pencil, bool with_vectors = false,
                      double kernel_rel_tol = 1e-10);

// Smallest eigenvalue above the kernel and its vector. `kernel` holds columns
// spanning the null space of the pencil; they are deflated explicitly, so
// they must be the whole kernel. `expected_kernel_dim` >= 0 cross-checks the
// basis width; a converged smallest value that is itself numerically zero
// also raises kernel_mismatch. converged=false signals iteration failure.
EigResult smallest_nonzero(const SymmetricPencil& pencil, const Eigen::MatrixXd& kernel,
                           long expected_kernel_dim = -1, const EigOptions& opt = {});

struct Extrapolation {
  double value = 0.0;          // limit estimate from the two finest levels
  double error_bar = 0.0;      // magnitude of the final correction
  double observed_order = 0.0; // log2 of consecutive difference ratios (0 if < 3 levels)
  bool monotone = true;        // consecutive differences kept one sign
};

// levels[i] is the value on grid spacing h / 2^i (coarsest first, >= 2 entries).
// Assumes a leading-order h^2 error term.
Extrapolation richardson_extrapolate(const std::vector<double>& levels);

}  // namespace derham
