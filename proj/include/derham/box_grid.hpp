#pragma once

// Uniform grid on the box [0, side]^N carrying one degree of freedom per
// q-dimensional cell. A q-cell is a pair (base vertex, axis subset S with
// |S| = q): it spans one grid spacing along each axis in S and is pinned at a
// lattice coordinate along the rest. The base index runs 0..m-1 along axes in
// S and 0..m along the others, so the class (subset) sizes differ.
//
// Cochain values are understood as integrals of a q-form over the cells.
// The tangential boundary condition removes every cell contained in the
// boundary of the box, i.e. cells with a pinned coordinate at 0 or m.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace derham {

enum class BoundaryCondition { none, tangential };

struct CellRef {
  std::uint32_t axes = 0;  // bitmask of extruded axes, popcount == q
  Eigen::VectorXi base;    // lattice index of the low corner
};

class BoxGrid {
 public:
  // n_dim >= 1, cells_per_axis >= 2, side > 0. Rejects grids whose total
  // number of cells over all degrees, (2m+1)^N, exceeds 1e8.
  BoxGrid(int n_dim, int cells_per_axis, double side = 1.0);

  int n_dim() const { return n_; }
  int cells_per_axis() const { return m_; }
  double side() const { return side_; }
  double spacing() const { return side_ / m_; }
  double diameter() const;

  long cell_count(int q) const;
  long cell_count(int q, BoundaryCondition bc) const;

  // Cell enumeration: classes in ascending axis-mask order; within a class,
  // base indices row-major with the last axis fastest. Indices are positions
  // in the full (no boundary condition) enumeration.
  CellRef cell(int q, long index) const;
  long cell_index(const CellRef& c) const;
  bool on_boundary(const CellRef& c) const;
  Eigen::VectorXd barycenter(const CellRef& c) const;

  // Full-enumeration indices of the cells kept under bc, ascending. For
  // BoundaryCondition::none this is the identity list.
  const std::vector<long>& kept_cells(int q, BoundaryCondition bc) const;

  // Dimension of the discrete harmonic space expected at degree q. This is
  // Betti data of the box (a table on the grid, not a constant in the
  // callers): the tangential complex sees a single harmonic cochain at the
  // top degree, the unconstrained one a single constant at degree zero.
  int expected_harmonic_dim(int q, BoundaryCondition bc) const;

 private:
  int n_ = 0;
  int m_ = 0;
  double side_ = 1.0;
  std::vector<int> betti_;  // betti_[k]: rank of degree-k cohomology of the box
  // kept-cell lists, cached per (q, bc)
  mutable std::vector<std::vector<long>> kept_none_, kept_tangential_;
};

struct Cochain {
  int q = 0;
  BoundaryCondition bc = BoundaryCondition::none;
  Eigen::VectorXd values;  // one entry per kept cell, enumeration order
};

}  // namespace derham
