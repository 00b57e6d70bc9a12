#pragma once

// Independent reference routes for the tests. The eigenvalue oracle is a
// hand-rolled cyclic Jacobi rotation scheme, so agreement with the library's
// solvers is a genuine two-route check rather than the same code called twice.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracles {

struct JacobiEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // a = vectors * diag(values) * vectors^T
};

// Cyclic Jacobi rotations on a symmetric matrix.
inline JacobiEigen jacobi_eigen(Eigen::MatrixXd a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: square matrix required");
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  JacobiEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

// All eigenvalues (ascending) of the symmetric pencil k x = lambda m x,
// whitened with the Jacobi factorization of m.
inline Eigen::VectorXd pencil_eigenvalues(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m) {
  const JacobiEigen em = jacobi_eigen(m);
  if (em.values.minCoeff() <= 0.0)
    throw std::invalid_argument("pencil_eigenvalues: mass matrix not positive definite");
  const Eigen::MatrixXd w = em.vectors *
                            em.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                            em.vectors.transpose();
  Eigen::MatrixXd b = w * k * w;
  b = 0.5 * (b + b.transpose()).eval();
  return jacobi_eigen(b).values;
}

// Smallest pencil eigenvalue above kernel_rel_tol times the largest.
inline double smallest_positive(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m,
                                double kernel_rel_tol = 1e-10) {
  const Eigen::VectorXd vals = pencil_eigenvalues(k, m);
  const double floor = kernel_rel_tol * std::max(vals.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] > floor) return vals[i];
  return std::numeric_limits<double>::infinity();
}

// Zero eigenvalues of the pencil, counted with the same relative floor.
inline long kernel_dim(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m,
                       double kernel_rel_tol = 1e-10) {
  const Eigen::VectorXd vals = pencil_eigenvalues(k, m);
  const double floor = kernel_rel_tol * std::max(vals.maxCoeff(), 0.0);
  long count = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] <= floor) ++count;
  return count;
}

// Rank from the Gram spectrum (again Jacobi only).
inline long rank(const Eigen::MatrixXd& a, double rel_tol = 1e-10) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd vals = jacobi_eigen(gram).values;
  const double top = std::max(vals.maxCoeff(), 0.0);
  if (top <= 0.0) return 0;
  long r = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] > rel_tol * top) ++r;
  return r;
}

}  // namespace oracles
