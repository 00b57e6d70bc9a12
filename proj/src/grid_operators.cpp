#include "derham/grid_operators.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "derham/combinatorics.hpp"

namespace derham {

EpsilonWeight EpsilonWeight::identity() { return {}; }

EpsilonWeight EpsilonWeight::scalar(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("EpsilonWeight: scalar must be positive");
  EpsilonWeight w;
  w.kind = Kind::scalar_field;
  w.field = [value](const Eigen::VectorXd&) { return value; };
  w.label = "scalar(" + std::to_string(value) + ")";
  return w;
}

EpsilonWeight EpsilonWeight::scalar_field(std::function<double(const Eigen::VectorXd&)> f,
                                          std::string label) {
  EpsilonWeight w;
  w.kind = Kind::scalar_field;
  w.field = std::move(f);
  w.label = std::move(label);
  return w;
}

EpsilonWeight EpsilonWeight::constant_spd(Eigen::MatrixXd mat) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("EpsilonWeight: matrix must be square");
  EpsilonWeight w;
  w.kind = Kind::constant_spd;
  w.matrix = 0.5 * (mat + mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.matrix);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("EpsilonWeight: matrix must be positive definite");
  w.label = "constant_spd(" + std::to_string(mat.rows()) + ")";
  return w;
}

namespace {

// full-enumeration index -> position among kept cells, or -1.
std::vector<long> kept_positions(const BoxGrid& grid, int q, BoundaryCondition bc) {
  std::vector<long> pos(static_cast<std::size_t>(grid.cell_count(q)), -1);
  const auto& kept = grid.kept_cells(q, bc);
  for (std::size_t i = 0; i < kept.size(); ++i)
    pos[static_cast<std::size_t>(kept[i])] = static_cast<long>(i);
  return pos;
}

}  // namespace

Eigen::SparseMatrix<double> exterior_derivative(const BoxGrid& grid, int q,
                                                BoundaryCondition bc) {
  const int n = grid.n_dim();
  if (q < 0 || q >= n)
    throw std::invalid_argument("exterior_derivative: degree must satisfy 0 <= q < N");
  const auto& rows = grid.kept_cells(q + 1, bc);
  const auto col_of = kept_positions(grid, q, bc);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(rows.size() * 2 * static_cast<std::size_t>(q + 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const CellRef cell = grid.cell(q + 1, rows[r]);
    for (int a = 0; a < n; ++a) {
      if (!(cell.axes & (1u << a))) continue;
      const std::uint32_t face_axes = cell.axes & ~(1u << a);
      const double sign = insertion_sign(face_axes, a);
      CellRef face;
      face.axes = face_axes;
      face.base = cell.base;
      const long near = col_of[static_cast<std::size_t>(grid.cell_index(face))];
      face.base[a] += 1;
      const long far = col_of[static_cast<std::size_t>(grid.cell_index(face))];
      if (far >= 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(far), sign);
      if (near >= 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(near), -sign);
    }
  }
  Eigen::SparseMatrix<double> d(static_cast<long>(rows.size()),
                                grid.cell_count(q, bc));
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

MassMatrix mass_matrix(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                       BoundaryCondition bc) {
  const int n = grid.n_dim();
  if (q < 0 || q > n) throw std::invalid_argument("mass_matrix: bad degree");
  const double base = std::pow(grid.spacing(), n - 2 * q);
  const auto& kept = grid.kept_cells(q, bc);
  const auto count = static_cast<Eigen::Index>(kept.size());

  switch (eps.kind) {
    case EpsilonWeight::Kind::identity:
      return MassMatrix::diagonal(Eigen::VectorXd::Constant(count, base));

    case EpsilonWeight::Kind::scalar_field: {
      Eigen::VectorXd diag(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        const double w = eps.field(grid.barycenter(grid.cell(q, kept[static_cast<std::size_t>(i)])));
        if (!(w > 0.0))
          throw std::invalid_argument("mass_matrix: scalar weight must be positive everywhere");
        diag[i] = base * w;
      }
      return MassMatrix::diagonal(diag);
    }

    case EpsilonWeight::Kind::constant_spd: {
      const long classes = binomial(n, q);
      if (eps.matrix.rows() != classes)
        throw std::invalid_argument("mass_matrix: weight matrix size must be binom(N, q)");
      const int m = grid.cells_per_axis();
      // Group co-located cells: all classes of a base vertex with every
      // coordinate in 0..m-1 exist, one cell per axis subset.
      long group_count = 1;
      for (int a = 0; a < n; ++a) group_count *= m;
      std::vector<std::vector<std::pair<int, long>>> groups(
          static_cast<std::size_t>(group_count));  // (class rank, kept position)
      Eigen::VectorXd diag = Eigen::VectorXd::Constant(count, 1.0);
      for (Eigen::Index i = 0; i < count; ++i) {
        const CellRef cell = grid.cell(q, kept[static_cast<std::size_t>(i)]);
        const int rank = subset_rank(n, cell.axes);
        bool grouped = true;
        long gid = 0;
        for (int a = 0; a < n; ++a) {
          if (cell.base[a] >= m) grouped = false;
          gid = gid * m + std::min(cell.base[a], m - 1);
        }
        if (grouped)
          groups[static_cast<std::size_t>(gid)].emplace_back(rank, static_cast<long>(i));
        else
          diag[i] = base * eps.matrix(rank, rank);
      }
      std::vector<MassMatrix::Block> blocks;
      for (const auto& g : groups) {
        if (g.empty()) continue;
        if (g.size() == 1) {
          diag[g[0].second] = base * eps.matrix(g[0].first, g[0].first);
          continue;
        }
        MassMatrix::Block b;
        b.index.reserve(g.size());
        b.mat.resize(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
        for (std::size_t r = 0; r < g.size(); ++r) {
          b.index.push_back(g[r].second);
          for (std::size_t c = 0; c < g.size(); ++c)
            b.mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                base * eps.matrix(g[r].first, g[c].first);
        }
        blocks.push_back(std::move(b));
      }
      return MassMatrix::with_blocks(diag, std::move(blocks));
    }
  }
  throw std::logic_error("mass_matrix: unreachable");
}

Eigen::SparseMatrix<double> codifferential(const BoxGrid& grid, int q,
                                           const EpsilonWeight& eps, BoundaryCondition bc) {
  const int n = grid.n_dim();
  if (q < 1 || q > n) throw std::invalid_argument("codifferential: degree must satisfy 1 <= q <= N");
  const Eigen::SparseMatrix<double> d = exterior_derivative(grid, q - 1, bc);
  const Eigen::SparseMatrix<double> m_eps = mass_matrix(grid, q, eps, bc).to_sparse();
  const double m_prev = std::pow(grid.spacing(), n - 2 * (q - 1));
  Eigen::SparseMatrix<double> delta = d.transpose() * m_eps;
  delta *= -1.0 / m_prev;
  return delta;
}

EpsilonBounds epsilon_bounds(const BoxGrid& grid, int q, const EpsilonWeight& eps) {
  const double base = std::pow(grid.spacing(), grid.n_dim() - 2 * q);
  const auto [lo, hi] =
      mass_matrix(grid, q, eps, BoundaryCondition::none).eigenvalue_extremes();
  EpsilonBounds b;
  b.under = 1.0 / std::sqrt(lo / base);
  b.over = std::sqrt(hi / base);
  b.hat = std::max(b.under, b.over);
  return b;
}

void export_coordinate_text(const Eigen::SparseMatrix<double>& mat, std::ostream& os) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm(mat);
  for (int r = 0; r < rm.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, r); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace derham
