#include "derham/hodge_dual.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "derham/combinatorics.hpp"

namespace derham {

namespace {

// Stored-coordinate extent of a dual cell along one axis.
inline long dual_extent(const BoxGrid& grid, std::uint32_t axes, int a) {
  return (axes & (1u << a)) ? grid.cells_per_axis() + 1 : grid.cells_per_axis();
}

long dual_class_size(const BoxGrid& grid, int p) {
  long size = 1;
  for (int a = 0; a < grid.n_dim(); ++a)
    size *= (a < p) ? grid.cells_per_axis() + 1 : grid.cells_per_axis();
  return size;
}

inline std::uint32_t complement_mask(int n_dim, std::uint32_t axes) {
  return ((1u << n_dim) - 1u) & ~axes;
}

}  // namespace

long dual_cell_count(const BoxGrid& grid, int p) {
  if (p < 0 || p > grid.n_dim()) throw std::invalid_argument("dual_cell_count: bad degree");
  return binomial(grid.n_dim(), p) * dual_class_size(grid, p);
}

long dual_cell_index(const BoxGrid& grid, const CellRef& dual) {
  const int n = grid.n_dim();
  const int p = std::popcount(dual.axes);
  long within = 0;
  for (int a = 0; a < n; ++a) {
    const long extent = dual_extent(grid, dual.axes, a);
    const long coord = dual.base[a];
    if (coord < 0 || coord >= extent) throw std::out_of_range("dual_cell_index: coordinate");
    within = within * extent + coord;
  }
  return subset_rank(n, dual.axes) * dual_class_size(grid, p) + within;
}

CellRef dual_cell(const BoxGrid& grid, int p, long index) {
  const int n = grid.n_dim();
  const long class_size = dual_class_size(grid, p);
  if (index < 0 || index >= dual_cell_count(grid, p))
    throw std::out_of_range("dual_cell: index");
  const auto subsets = axis_subsets(n, p);
  CellRef dual;
  dual.axes = subsets[static_cast<std::size_t>(index / class_size)];
  dual.base.resize(n);
  long rest = index % class_size;
  for (int a = n - 1; a >= 0; --a) {
    const long extent = dual_extent(grid, dual.axes, a);
    dual.base[a] = static_cast<int>(rest % extent);
    rest /= extent;
  }
  return dual;
}

long dual_of_primal(const BoxGrid& grid, const CellRef& primal) {
  CellRef dual;
  dual.axes = complement_mask(grid.n_dim(), primal.axes);
  dual.base = primal.base;
  return dual_cell_index(grid, dual);
}

CellRef primal_of_dual(const BoxGrid& grid, const CellRef& dual) {
  CellRef primal;
  primal.axes = complement_mask(grid.n_dim(), dual.axes);
  primal.base = dual.base;
  return primal;
}

bool dual_cell_truncated(const BoxGrid& grid, const CellRef& dual) {
  for (int a = 0; a < grid.n_dim(); ++a)
    if ((dual.axes & (1u << a)) &&
        (dual.base[a] == 0 || dual.base[a] == grid.cells_per_axis()))
      return true;
  return false;
}

int hodge_sign(int n_dim, std::uint32_t axes) { return complement_sign(n_dim, axes); }

Eigen::VectorXd hodge_transport(const BoxGrid& grid, const Cochain& u) {
  const int n = grid.n_dim();
  const auto& kept = grid.kept_cells(u.q, u.bc);
  if (u.values.size() != static_cast<Eigen::Index>(kept.size()))
    throw std::invalid_argument("hodge_transport: cochain length mismatch");
  const double scale = std::pow(grid.spacing(), n - 2 * u.q);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dual_cell_count(grid, n - u.q));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const CellRef cell = grid.cell(u.q, kept[i]);
    out[dual_of_primal(grid, cell)] =
        hodge_sign(n, cell.axes) * scale * u.values[static_cast<Eigen::Index>(i)];
  }
  return out;
}

EpsilonWeight dual_weight(const BoxGrid& grid, int q, const EpsilonWeight& eps) {
  const int n = grid.n_dim();
  if (q < 0 || q > n) throw std::invalid_argument("dual_weight: bad degree");
  switch (eps.kind) {
    case EpsilonWeight::Kind::identity:
      return EpsilonWeight::identity();

    case EpsilonWeight::Kind::scalar_field: {
      auto f = eps.field;
      return EpsilonWeight::scalar_field([f](const Eigen::VectorXd& x) { return 1.0 / f(x); },
                                         "dual(" + eps.label + ")");
    }

    case EpsilonWeight::Kind::constant_spd: {
      if (eps.matrix.rows() != binomial(n, q))
        throw std::invalid_argument("dual_weight: weight size must be binom(N, q)");
      const Eigen::MatrixXd inv = eps.matrix.llt().solve(
          Eigen::MatrixXd::Identity(eps.matrix.rows(), eps.matrix.cols()));
      const auto duals = axis_subsets(n, n - q);
      const auto count = static_cast<Eigen::Index>(duals.size());
      Eigen::MatrixXd mu(count, count);
      for (Eigen::Index i = 0; i < count; ++i) {
        const std::uint32_t ci = complement_mask(n, duals[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < count; ++j) {
          const std::uint32_t cj = complement_mask(n, duals[static_cast<std::size_t>(j)]);
          mu(i, j) = hodge_sign(n, ci) * hodge_sign(n, cj) *
                     inv(subset_rank(n, ci), subset_rank(n, cj));
        }
      }
      return EpsilonWeight::constant_spd(mu);
    }
  }
  throw std::logic_error("dual_weight: unreachable");
}

}  // namespace derham
