#include "derham/eigensolve.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "derham/rng.hpp"

namespace derham {

namespace {

constexpr double kTiny = 1e-300;

// M-orthonormalize the columns of x (modified Gram-Schmidt, two sweeps),
// dropping columns that lose all but drop_tol of their length.
Eigen::MatrixXd m_orthonormalize(const MassMatrix& m, const Eigen::MatrixXd& x,
                                 double drop_tol = 1e-8) {
  Eigen::MatrixXd q(x.rows(), x.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd v = x.col(j);
    const double norm0 = m.norm(v);
    for (int sweep = 0; sweep < 2; ++sweep)
      for (Eigen::Index k = 0; k < rank; ++k) v -= m.inner(q.col(k), v) * q.col(k);
    const double nv = m.norm(v);
    if (norm0 > 0.0 && nv > drop_tol * norm0) q.col(rank++) = v / nv;
  }
  return q.leftCols(rank);
}

// Remove the components along the M-orthonormal columns of z.
void deflate(const MassMatrix& m, const Eigen::MatrixXd& z, Eigen::MatrixXd& x) {
  if (z.cols() == 0 || x.cols() == 0) return;
  x -= z * (z.transpose() * m.apply(x));
}

double pair_residual(const Eigen::VectorXd& kx, const Eigen::VectorXd& mx, double theta) {
  const double denom = kx.norm() + std::abs(theta) * mx.norm();
  return (kx - theta * mx).norm() / std::max(denom, kTiny);
}

}  // namespace

EigResult dense_solve(const SymmetricPencil& pencil, bool with_vectors,
                      double kernel_rel_tol) {
  const long n = pencil.k.rows();
  if (pencil.k.cols() != n || pencil.m.size() != n)
    throw std::invalid_argument("dense_solve: pencil shape mismatch");
  if (n > 5000) throw std::invalid_argument("dense_solve: problem larger than 5000 unknowns");
  EigResult out;
  if (n == 0) return out;

  Eigen::MatrixXd kd = Eigen::MatrixXd(pencil.k);
  kd = 0.5 * (kd + kd.transpose()).eval();
  // B = M^(-1/2) K M^(-1/2)
  Eigen::MatrixXd b =
      pencil.m.solve_sqrt(Eigen::MatrixXd(pencil.m.solve_sqrt(kd).transpose()));
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      b, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense_solve: eigensolver failed");

  out.values = es.eigenvalues();
  const double lmax = std::max(out.values.maxCoeff(), 0.0);
  const double floor = kernel_rel_tol * lmax;
  for (Eigen::Index i = 0; i < out.values.size() && out.values[i] <= floor; ++i)
    ++out.kernel_dim;
  if (with_vectors) {
    out.vectors = pencil.m.solve_sqrt(es.eigenvectors());
    out.residuals.resize(n);
    for (Eigen::Index j = 0; j < n; ++j)
      out.residuals[j] = pair_residual(pencil.k * out.vectors.col(j),
                                       pencil.m.apply(Eigen::VectorXd(out.vectors.col(j))),
                                       out.values[j]);
  }
  return out;
}

EigResult smallest_nonzero(const SymmetricPencil& pencil, const Eigen::MatrixXd& kernel,
                           long expected_kernel_dim, const EigOptions& opt) {
  const long n = pencil.k.rows();
  if (pencil.k.cols() != n || pencil.m.size() != n)
    throw std::invalid_argument("smallest_nonzero: pencil shape mismatch");
  if (kernel.size() > 0 && kernel.rows() != n)
    throw std::invalid_argument("smallest_nonzero: kernel basis length mismatch");

  EigResult out;
  out.kernel_dim = kernel.cols();
  if (expected_kernel_dim >= 0 && kernel.cols() != expected_kernel_dim)
    out.kernel_mismatch = true;

  const Eigen::MatrixXd z = kernel.cols() ? m_orthonormalize(pencil.m, kernel)
                                          : Eigen::MatrixXd(n, 0);
  if (z.cols() != kernel.cols()) out.kernel_mismatch = true;  // degenerate basis

  const long free_dim = n - z.cols();
  if (free_dim <= 0) {
    out.converged = false;
    return out;
  }
  const int block = static_cast<int>(
      std::clamp<long>(opt.block_size, 1, std::min<long>(free_dim, 20)));

  // Seeded start, deflated and M-orthonormalized.
  Rng rng(opt.seed);
  Eigen::MatrixXd x(n, block);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < block; ++j) x(i, j) = rng.gaussian();
  deflate(pencil.m, z, x);
  x = m_orthonormalize(pencil.m, x);
  while (x.cols() < block) {  // replenish in the unlikely rank-deficient start
    Eigen::MatrixXd extra(n, block - x.cols());
    for (long i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < extra.cols(); ++j) extra(i, j) = rng.gaussian();
    deflate(pencil.m, z, extra);
    Eigen::MatrixXd joined(n, x.cols() + extra.cols());
    joined << x, extra;
    x = m_orthonormalize(pencil.m, joined);
  }

  // Preconditioner: a sparse factorization of K + sigma M with sigma well
  // below the wanted eigenvalue's scale, so applying it is close to K^-1 on
  // the deflated space while zero modes of K stay factorizable. When the
  // factorization is rejected, fall back to the diagonal of K with a
  // mass-scaled floor for zero rows.
  const Eigen::SparseMatrix<double> m_sparse = pencil.m.to_sparse();
  Eigen::VectorXd dk = pencil.k.diagonal();
  Eigen::VectorXd dm = m_sparse.diagonal();
  const double ratio =
      (dk.sum() > 0.0 && dm.sum() > 0.0) ? dk.sum() / std::max(dm.sum(), kTiny) : 1.0;
  const double sigma = 1e-6 * ratio + kTiny;
  Eigen::SparseMatrix<double> shifted = pencil.k + sigma * m_sparse;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  const bool factored = (ldlt.info() == Eigen::Success);
  Eigen::VectorXd t = dk + 1e-2 * ratio * dm;
  for (long i = 0; i < n; ++i)
    if (!(t[i] > 0.0)) t[i] = 1.0;

  Eigen::MatrixXd p(n, 0);
  double lam_scale = 0.0;
  double res_first = 1.0;
  double theta_first = 0.0;
  Eigen::VectorXd vec_first;
  out.converged = false;

  for (int it = 1; it <= opt.max_iter; ++it) {
    out.iterations = it;
    deflate(pencil.m, z, x);
    x = m_orthonormalize(pencil.m, x);
    if (x.cols() == 0) break;

    Eigen::MatrixXd kx = pencil.k * x;
    Eigen::MatrixXd mx = pencil.m.apply(x);
    Eigen::MatrixXd h = x.transpose() * kx;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd theta = es.eigenvalues();
    const Eigen::MatrixXd c = es.eigenvectors();
    x = (x * c).eval();
    kx = (kx * c).eval();
    mx = (mx * c).eval();
    lam_scale = std::max(lam_scale, theta.maxCoeff());

    theta_first = theta[0];
    vec_first = x.col(0);
    res_first = pair_residual(kx.col(0), mx.col(0), theta_first);
    if (res_first <= opt.tol) {
      out.converged = true;
      break;
    }

    Eigen::MatrixXd r = kx - mx * theta.asDiagonal();
    Eigen::MatrixXd w = factored ? Eigen::MatrixXd(ldlt.solve(r))
                                 : Eigen::MatrixXd((r.array().colwise() / t.array()).matrix());
    deflate(pencil.m, z, w);
    deflate(pencil.m, z, p);

    Eigen::MatrixXd s(n, x.cols() + w.cols() + p.cols());
    s << x, w, p;
    s = m_orthonormalize(pencil.m, s);
    if (s.cols() <= x.cols()) break;  // no progress directions survive

    Eigen::MatrixXd ks = pencil.k * s;
    Eigen::MatrixXd hs = s.transpose() * ks;
    hs = 0.5 * (hs + hs.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_s(hs);
    const Eigen::Index take = std::min<Eigen::Index>(block, s.cols());
    Eigen::MatrixXd y = es_s.eigenvectors().leftCols(take);
    Eigen::MatrixXd y_p = y;
    y_p.topRows(x.cols()).setZero();
    x = s * y;
    p = m_orthonormalize(pencil.m, s * y_p);
    if (p.cols() > block) p = p.leftCols(block).eval();
  }

  if (vec_first.size() == n) {
    out.values.resize(1);
    out.values[0] = theta_first;
    out.vectors = vec_first;
    out.residuals.resize(1);
    out.residuals[0] = res_first;
    if (out.converged && theta_first <= opt.kernel_rel_tol * std::max(lam_scale, 0.0))
      out.kernel_mismatch = true;  // an unexpected zero mode survived deflation
  } else {
    out.converged = false;
  }
  return out;
}

Extrapolation richardson_extrapolate(const std::vector<double>& levels) {
  if (levels.size() < 2)
    throw std::invalid_argument("richardson_extrapolate: need at least two levels");
  const std::size_t count = levels.size();
  Extrapolation e;
  const double correction = (levels[count - 1] - levels[count - 2]) / 3.0;
  e.value = levels[count - 1] + correction;
  e.error_bar = std::abs(correction);
  for (std::size_t i = 0; i + 2 < count; ++i) {
    const double d1 = levels[i + 1] - levels[i];
    const double d2 = levels[i + 2] - levels[i + 1];
    if (d1 * d2 <= 0.0) e.monotone = false;
  }
  if (count >= 3) {
    const double d1 = levels[count - 2] - levels[count - 3];
    const double d2 = levels[count - 1] - levels[count - 2];
    if (d1 != 0.0 && d2 != 0.0 && d1 * d2 > 0.0) e.observed_order = std::log2(std::abs(d1 / d2));
  }
  return e;
}

}  // namespace derham
