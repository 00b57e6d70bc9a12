#pragma once

// Axis-subset bookkeeping for cubical cell complexes. A q-cell class is a
// size-q subset of the axes {0..N-1}, stored as a bitmask and enumerated in
// ascending mask order. The alternating signs used by exterior derivatives
// and Hodge pairings are parity counts over these masks.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace derham {

long binomial(int n, int k);

// All size-q subsets of {0..n_dim-1} as bitmasks, ascending by mask value.
std::vector<std::uint32_t> axis_subsets(int n_dim, int q);

// Position (0-based) of the subset within axis_subsets(n_dim, popcount(mask)).
int subset_rank(int n_dim, std::uint32_t mask);

// Number of set bits of mask strictly below axis; equals the 0-based position
// of axis inside mask | bit(axis) once that bit is set.
int bits_below(std::uint32_t mask, int axis);

// Sign (-1)^{bits_below(mask, axis)} picked up when dx^axis is moved into its
// sorted slot of dx^(mask | bit(axis)). `mask` must not contain axis.
int insertion_sign(std::uint32_t mask, int axis);

// Parity of the permutation sorting (bits of mask ascending, complement
// ascending) into 0..n_dim-1. Satisfies sign(S) * sign(S^c) = (-1)^{q(n-q)}.
int complement_sign(int n_dim, std::uint32_t mask);

// Matrix of q-minors of an n x n Jacobian. Entry (row J, column I) is the
// determinant of jac(I, J): row subset I (target components), column subset J
// (source directions), both in ascending mask order. A degree-q pullback acts
// on ordered component vectors by this matrix; Cauchy-Binet makes the
// assignment functorial: minors(A*B, q) = minors(B, q) * minors(A, q).
Eigen::MatrixXd minor_matrix(const Eigen::MatrixXd& jac, int q);

// Adjugate from cofactor minors; adj(a) * a = det(a) * identity holds for
// every square matrix, invertible or not.
Eigen::MatrixXd adjugate(const Eigen::MatrixXd& a);

}  // namespace derham
