#include "derham/combinatorics.hpp"

#include <bit>
#include <stdexcept>

namespace derham {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

std::vector<std::uint32_t> axis_subsets(int n_dim, int q) {
  if (n_dim < 0 || q < 0 || q > n_dim)
    throw std::invalid_argument("axis_subsets: need 0 <= q <= n_dim");
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(binomial(n_dim, q)));
  const std::uint32_t limit = 1u << n_dim;
  for (std::uint32_t mask = 0; mask < limit; ++mask)
    if (std::popcount(mask) == q) out.push_back(mask);
  return out;
}

int subset_rank(int n_dim, std::uint32_t mask) {
  const int q = std::popcount(mask);
  int rank = 0;
  for (std::uint32_t m = 0; m < mask; ++m)
    if (std::popcount(m) == q) ++rank;
  (void)n_dim;
  return rank;
}

int bits_below(std::uint32_t mask, int axis) {
  return std::popcount(mask & ((1u << axis) - 1u));
}

int insertion_sign(std::uint32_t mask, int axis) {
  return (bits_below(mask, axis) % 2 == 0) ? 1 : -1;
}

int complement_sign(int n_dim, std::uint32_t mask) {
  // Count inversions between the sorted subset and its sorted complement.
  int inversions = 0;
  for (int a = 0; a < n_dim; ++a) {
    if (!(mask & (1u << a))) continue;
    for (int b = 0; b < a; ++b)
      if (!(mask & (1u << b))) ++inversions;
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

Eigen::MatrixXd minor_matrix(const Eigen::MatrixXd& jac, int q) {
  const int n = static_cast<int>(jac.rows());
  if (jac.cols() != n) throw std::invalid_argument("minor_matrix: square Jacobian required");
  const auto subsets = axis_subsets(n, q);
  const auto count = static_cast<Eigen::Index>(subsets.size());
  Eigen::MatrixXd minors(count, count);
  std::vector<int> rows, cols;
  for (Eigen::Index jr = 0; jr < count; ++jr) {
    cols.clear();
    for (int a = 0; a < n; ++a)
      if (subsets[static_cast<std::size_t>(jr)] & (1u << a)) cols.push_back(a);
    for (Eigen::Index ir = 0; ir < count; ++ir) {
      rows.clear();
      for (int a = 0; a < n; ++a)
        if (subsets[static_cast<std::size_t>(ir)] & (1u << a)) rows.push_back(a);
      Eigen::MatrixXd sub(q, q);
      for (int r = 0; r < q; ++r)
        for (int c = 0; c < q; ++c) sub(r, c) = jac(rows[static_cast<std::size_t>(r)],
                                                    cols[static_cast<std::size_t>(c)]);
      minors(jr, ir) = (q == 0) ? 1.0 : sub.determinant();
    }
  }
  return minors;
}

Eigen::MatrixXd adjugate(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("adjugate: square matrix required");
  Eigen::MatrixXd adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  Eigen::MatrixXd sub(n - 1, n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          sub(rr, cc) = a(r, c);
          ++cc;
        }
        ++rr;
      }
      const double cof = ((i + j) % 2 == 0 ? 1.0 : -1.0) * sub.determinant();
      adj(j, i) = cof;  // adjugate is the transposed cofactor matrix
    }
  }
  return adj;
}

}  // namespace derham
