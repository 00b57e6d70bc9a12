#pragma once

#include <Eigen/Dense>

#include "derham/box_grid.hpp"
#include "derham/grid_operators.hpp"

namespace derham {

// Duality between primal q-cells and staggered (N-q)-cells.
//
// The staggered lattice lives at the primal cell centers: the dual of the
// primal q-cell (v, S) is the (N-q)-cell with axis set S^c that crosses it
// orthogonally through its barycenter.  Along an axis a in S^c the dual cell
// spans the two neighbouring N-cell centers, so its lattice coordinate is
// v_a - 1; along an axis a in S it is pinned at the primal cell's center and
// keeps the coordinate v_a.
//
// Dual cells are enumerated like primal ones (axis classes ascending by mask,
// row-major within a class, last axis fastest) but with the coordinate
// v_a - 1 stored with offset +1, so the stored coordinate ranges over
// 0..cells_per_axis on spanning axes and 0..cells_per_axis-1 on pinned ones.
// With that storage the stored coordinate vector of the dual cell equals the
// base vector of its primal partner, and the pairing is a bijection between
// the full primal and dual enumerations.  Dual cells that stick out of the
// domain (stored coordinate 0 or cells_per_axis on a spanning axis) are the
// partners of the primal cells removed by the tangential boundary condition.

// Number of dual p-cells in the extended enumeration:
// (m+1)^p * m^(N-p) for m cells per axis.
long dual_cell_count(const BoxGrid& grid, int p);

// Dual cells reuse CellRef: `axes` is the spanning axis set, `base` the
// stored coordinates (true lattice coordinate + 1 on spanning axes).
long dual_cell_index(const BoxGrid& grid, const CellRef& dual);
CellRef dual_cell(const BoxGrid& grid, int p, long index);

// The pairing between primal q-cells and dual (N-q)-cells.
long dual_of_primal(const BoxGrid& grid, const CellRef& primal);
CellRef primal_of_dual(const BoxGrid& grid, const CellRef& dual);

// True when the dual cell is cut by the domain boundary (its primal partner
// carries a pinned coordinate at 0 or cells_per_axis).
bool dual_cell_truncated(const BoxGrid& grid, const CellRef& dual);

// Orientation sign attached to the primal axis set S: the permutation sign
// of (S, S^c) relative to (1, ..., N).  Applying the transport twice picks up
// hodge_sign(S) * hodge_sign(S^c) = (-1)^(q(N-q)).
int hodge_sign(int n_dim, std::uint32_t axes);

// Transport a q-cochain to the dual lattice: the dual value of cell (v, S)
// is hodge_sign(S) * h^(N-2q) * value.  Returns values over the full dual
// enumeration of degree N-q; for a tangential cochain the truncated dual
// cells (the partners of the removed primal cells) stay zero.  Pairing dual
// values with the dual mass scale h^(N-2(N-q)) makes the transport an exact
// isometry of the discrete inner products.
Eigen::VectorXd hodge_transport(const BoxGrid& grid, const Cochain& u);

// Weight seen by the transported problem: the inverse weight conjugated by
// the transport.  Scalar fields map to their pointwise reciprocal; a
// constant matrix on q-form components maps to
//   mu_{A,B} = s(A) s(B) (eps^-1)_{A^c, B^c},  s(A) = hodge_sign(A^c),
// on (N-q)-form components.  Transporting twice returns the original weight.
EpsilonWeight dual_weight(const BoxGrid& grid, int q, const EpsilonWeight& eps);

}  // namespace derham
