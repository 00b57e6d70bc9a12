#include "derham/box_grid.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "derham/combinatorics.hpp"

namespace derham {

BoxGrid::BoxGrid(int n_dim, int cells_per_axis, double side)
    : n_(n_dim), m_(cells_per_axis), side_(side) {
  if (n_ < 1) throw std::invalid_argument("BoxGrid: n_dim must be at least 1");
  if (m_ < 2) throw std::invalid_argument("BoxGrid: cells_per_axis must be at least 2");
  if (!(side_ > 0.0)) throw std::invalid_argument("BoxGrid: side must be positive");
  // Total cells over all degrees: prod_axes (m + (m+1)) = (2m+1)^N.
  double total = 1.0;
  for (int a = 0; a < n_; ++a) total *= 2.0 * m_ + 1.0;
  if (total > 1e8) throw std::invalid_argument("BoxGrid: cell count exceeds 1e8");
  betti_.assign(static_cast<std::size_t>(n_) + 1, 0);
  betti_[0] = 1;  // the box is contractible
  kept_none_.resize(static_cast<std::size_t>(n_) + 1);
  kept_tangential_.resize(static_cast<std::size_t>(n_) + 1);
}

double BoxGrid::diameter() const { return side_ * std::sqrt(static_cast<double>(n_)); }

long BoxGrid::cell_count(int q) const {
  if (q < 0 || q > n_) return 0;
  long count = 0;
  for (std::uint32_t mask : axis_subsets(n_, q)) {
    long c = 1;
    for (int a = 0; a < n_; ++a) c *= (mask & (1u << a)) ? m_ : m_ + 1;
    count += c;
  }
  return count;
}

long BoxGrid::cell_count(int q, BoundaryCondition bc) const {
  return static_cast<long>(kept_cells(q, bc).size());
}

CellRef BoxGrid::cell(int q, long index) const {
  if (q < 0 || q > n_) throw std::invalid_argument("BoxGrid::cell: bad degree");
  for (std::uint32_t mask : axis_subsets(n_, q)) {
    long class_size = 1;
    for (int a = 0; a < n_; ++a) class_size *= (mask & (1u << a)) ? m_ : m_ + 1;
    if (index >= class_size) {
      index -= class_size;
      continue;
    }
    CellRef ref;
    ref.axes = mask;
    ref.base.resize(n_);
    for (int a = n_ - 1; a >= 0; --a) {  // last axis fastest
      const long extent = (mask & (1u << a)) ? m_ : m_ + 1;
      ref.base[a] = static_cast<int>(index % extent);
      index /= extent;
    }
    return ref;
  }
  throw std::out_of_range("BoxGrid::cell: index out of range");
}

long BoxGrid::cell_index(const CellRef& c) const {
  const int q = std::popcount(c.axes);
  long offset = 0;
  for (std::uint32_t mask : axis_subsets(n_, q)) {
    long class_size = 1;
    for (int a = 0; a < n_; ++a) class_size *= (mask & (1u << a)) ? m_ : m_ + 1;
    if (mask != c.axes) {
      offset += class_size;
      continue;
    }
    long linear = 0;
    for (int a = 0; a < n_; ++a) {
      const long extent = (c.axes & (1u << a)) ? m_ : m_ + 1;
      linear = linear * extent + c.base[a];
    }
    return offset + linear;
  }
  throw std::invalid_argument("BoxGrid::cell_index: axis mask does not match grid dimension");
}

bool BoxGrid::on_boundary(const CellRef& c) const {
  // Contained in the boundary iff some pinned coordinate sits on a face.
  for (int a = 0; a < n_; ++a) {
    if (c.axes & (1u << a)) continue;
    if (c.base[a] == 0 || c.base[a] == m_) return true;
  }
  return false;
}

Eigen::VectorXd BoxGrid::barycenter(const CellRef& c) const {
  const double h = spacing();
  Eigen::VectorXd x(n_);
  for (int a = 0; a < n_; ++a)
    x[a] = h * (c.base[a] + ((c.axes & (1u << a)) ? 0.5 : 0.0));
  return x;
}

const std::vector<long>& BoxGrid::kept_cells(int q, BoundaryCondition bc) const {
  if (q < 0 || q > n_) throw std::invalid_argument("BoxGrid::kept_cells: bad degree");
  auto& cache = (bc == BoundaryCondition::none) ? kept_none_ : kept_tangential_;
  auto& list = cache[static_cast<std::size_t>(q)];
  if (!list.empty() || cell_count(q) == 0) return list;
  const long total = cell_count(q);
  list.reserve(static_cast<std::size_t>(total));
  for (long i = 0; i < total; ++i) {
    if (bc == BoundaryCondition::none || !on_boundary(cell(q, i))) list.push_back(i);
  }
  return list;
}

int BoxGrid::expected_harmonic_dim(int q, BoundaryCondition bc) const {
  if (q < 0 || q > n_) return 0;
  // Tangential condition pairs degree q with the cohomology of degree N - q.
  const int k = (bc == BoundaryCondition::tangential) ? n_ - q : q;
  return betti_[static_cast<std::size_t>(k)];
}

}  // namespace derham
