#pragma once

// Dense model of a short Hilbert complex
//
//     H0 --a0--> H1 --a1--> H2,      a1 * a0 = 0,
//
// with an inner product on each space given by an SPD Gram matrix. The
// functions below compute metric adjoints, the best constants in the
// inequalities ||x|| <= c ||A x|| on the orthogonal complement of the kernel,
// the kernel of the middle Laplacian a0 a0* + a1* a1, and the induced
// orthogonal three-way splitting of the middle space. Everything is dense
// and templated on the scalar type; Eigen does the factorizations.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "derham/rng.hpp"

namespace derham {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Relative threshold separating "zero" pencil eigenvalues from the physical
// spectrum; constructed kernels sit many orders below it.
template <typename Scalar>
Scalar default_rel_tol() {
  return Scalar(1e5) * Eigen::NumTraits<Scalar>::epsilon();
}

template <typename Scalar>
struct MetricSpace {
  DenseMatrix<Scalar> gram;  // SPD

  Eigen::Index dim() const { return gram.rows(); }
  Scalar inner(const DenseVector<Scalar>& u, const DenseVector<Scalar>& v) const {
    return u.dot(gram * v);
  }
  Scalar norm(const DenseVector<Scalar>& u) const {
    using std::sqrt;
    return sqrt(inner(u, u));
  }
  static MetricSpace standard(Eigen::Index n) {
    return {DenseMatrix<Scalar>::Identity(n, n)};
  }
};

template <typename Scalar>
struct ComplexPair {
  MetricSpace<Scalar> h0, h1, h2;
  DenseMatrix<Scalar> a0;  // h1.dim x h0.dim
  DenseMatrix<Scalar> a1;  // h2.dim x h1.dim, with a1 * a0 = 0
};

template <typename Scalar>
struct WeightBounds {
  Scalar under, over, hat;
};

// Inverse square root of an SPD matrix (dense, eigendecomposition based).
template <typename Scalar>
DenseMatrix<Scalar> inverse_sqrt(const DenseMatrix<Scalar>& gram) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(gram);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= Scalar(0))
    throw std::invalid_argument("inverse_sqrt: matrix must be SPD");
  return es.operatorInverseSqrt();
}

// Metric adjoint of A : (dom, G_dom) -> (cod, G_cod) as a matrix,
// G_dom^-1 A^T G_cod, so that <A u, v>_cod = <u, A* v>_dom.
template <typename Scalar>
DenseMatrix<Scalar> adjoint_matrix(const DenseMatrix<Scalar>& a,
                                   const MetricSpace<Scalar>& dom,
                                   const MetricSpace<Scalar>& cod) {
  if (a.cols() != dom.dim() || a.rows() != cod.dim())
    throw std::invalid_argument("adjoint_matrix: shape mismatch");
  return dom.gram.llt().solve(a.transpose() * cod.gram);
}

// Gram-Schmidt in the metric of `space` with rank detection: returns columns
// spanning the same space as `cols`, orthonormal w.r.t. the Gram matrix.
template <typename Scalar>
DenseMatrix<Scalar> metric_orthonormalize(const DenseMatrix<Scalar>& cols,
                                          const MetricSpace<Scalar>& space,
                                          Scalar rel_tol = default_rel_tol<Scalar>()) {
  const Eigen::Index n = cols.rows();
  DenseMatrix<Scalar> basis(n, cols.cols());
  Eigen::Index rank = 0;
  Scalar largest(0);
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    DenseVector<Scalar> v = cols.col(j);
    for (int sweep = 0; sweep < 2; ++sweep)  // re-orthogonalize once for stability
      for (Eigen::Index k = 0; k < rank; ++k)
        v -= space.inner(basis.col(k), v) * basis.col(k);
    const Scalar nv = space.norm(v);
    largest = std::max(largest, space.norm(cols.col(j)));
    if (largest == Scalar(0) || nv <= rel_tol * largest) continue;
    basis.col(rank++) = v / nv;
  }
  return basis.leftCols(rank);
}

// Metric-orthonormal basis of the kernel of A.
template <typename Scalar>
DenseMatrix<Scalar> kernel_basis(const DenseMatrix<Scalar>& a, const MetricSpace<Scalar>& dom,
                                 Scalar rel_tol = default_rel_tol<Scalar>()) {
  if (a.rows() == 0 || a.size() == 0)
    return metric_orthonormalize(DenseMatrix<Scalar>::Identity(dom.dim(), dom.dim()), dom,
                                 rel_tol);
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(a, Eigen::ComputeFullV);
  const Scalar smax = svd.singularValues().size() ? svd.singularValues()(0) : Scalar(0);
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()(rank) > rel_tol * smax)
    ++rank;
  return metric_orthonormalize(
      DenseMatrix<Scalar>(svd.matrixV().rightCols(a.cols() - rank)), dom, rel_tol);
}

// Best constant c in  ||x||_dom <= c ||A x||_cod  for x orthogonal to ker A:
// the reciprocal of the smallest positive singular value of A between the two
// metrics. Computed from the pencil A^T G_cod A  vs  G_dom. Returns +inf when
// the map is zero (or one of the spaces is trivial).
template <typename Scalar>
Scalar constant_of(const DenseMatrix<Scalar>& a, const MetricSpace<Scalar>& dom,
                   const MetricSpace<Scalar>& cod,
                   Scalar rel_tol = default_rel_tol<Scalar>()) {
  using std::sqrt;
  if (dom.dim() == 0 || cod.dim() == 0) return std::numeric_limits<Scalar>::infinity();
  const DenseMatrix<Scalar> w = inverse_sqrt(dom.gram);
  DenseMatrix<Scalar> k = a.transpose() * cod.gram * a;
  k = (w * ((k + k.transpose()) / Scalar(2)) * w).eval();
  k = ((k + k.transpose()) / Scalar(2)).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(k);
  const auto& ev = es.eigenvalues();
  const Scalar lmax = ev(ev.size() - 1);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * lmax) return Scalar(1) / sqrt(ev(i));
  return std::numeric_limits<Scalar>::infinity();
}

// Symmetric pencil of the middle Laplacian a0 a0* + a1* a1 over G1:
// F = G1 a0 G0^-1 a0^T G1 + a1^T G2 a1.
template <typename Scalar>
DenseMatrix<Scalar> middle_laplacian_pencil(const ComplexPair<Scalar>& c) {
  DenseMatrix<Scalar> f = DenseMatrix<Scalar>::Zero(c.h1.dim(), c.h1.dim());
  if (c.h0.dim() > 0) {
    const DenseMatrix<Scalar> ga = c.h1.gram * c.a0;
    f += ga * c.h0.gram.llt().solve(ga.transpose());
  }
  if (c.h2.dim() > 0) f += c.a1.transpose() * c.h2.gram * c.a1;
  return ((f + f.transpose()) / Scalar(2)).eval();
}

// G1-orthonormal basis of the middle cohomology N(a1) cap N(a0*): the kernel
// of the middle Laplacian.
template <typename Scalar>
DenseMatrix<Scalar> cohomology_basis(const ComplexPair<Scalar>& c,
                                     Scalar rel_tol = default_rel_tol<Scalar>()) {
  const DenseMatrix<Scalar> w = inverse_sqrt(c.h1.gram);
  DenseMatrix<Scalar> b = w * middle_laplacian_pencil(c) * w;
  b = ((b + b.transpose()) / Scalar(2)).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(b);
  const auto& ev = es.eigenvalues();
  const Scalar lmax = ev.size() ? std::max(ev(ev.size() - 1), Scalar(0)) : Scalar(0);
  Eigen::Index k = 0;
  while (k < ev.size() && ev(k) <= rel_tol * lmax) ++k;
  DenseMatrix<Scalar> basis = w * es.eigenvectors().leftCols(k);
  return basis;
}

// Best constant of the combined operator: 1 / sqrt of the smallest nonzero
// eigenvalue of the middle Laplacian. Its square spectrum is the union of the
// squares of the two legs', so this equals max(constant_of(a0), constant_of(a1))
// with zero legs skipped.
template <typename Scalar>
Scalar combined_constant(const ComplexPair<Scalar>& c,
                         Scalar rel_tol = default_rel_tol<Scalar>()) {
  using std::sqrt;
  if (c.h1.dim() == 0) return std::numeric_limits<Scalar>::infinity();
  const DenseMatrix<Scalar> w = inverse_sqrt(c.h1.gram);
  DenseMatrix<Scalar> b = w * middle_laplacian_pencil(c) * w;
  b = ((b + b.transpose()) / Scalar(2)).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(b);
  const auto& ev = es.eigenvalues();
  const Scalar lmax = ev(ev.size() - 1);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * lmax) return Scalar(1) / sqrt(ev(i));
  return std::numeric_limits<Scalar>::infinity();
}

// Orthogonal splitting of a middle vector into range(a0) + harmonic +
// range(a1*). The three parts are mutually G1-orthogonal and sum to x.
template <typename Scalar>
struct HodgeSplit {
  DenseVector<Scalar> range_part, harmonic_part, costar_part;
};

template <typename Scalar>
HodgeSplit<Scalar> helmholtz_split(const ComplexPair<Scalar>& c, const DenseVector<Scalar>& x,
                                   Scalar rel_tol = default_rel_tol<Scalar>()) {
  if (x.size() != c.h1.dim()) throw std::invalid_argument("helmholtz_split: length mismatch");
  HodgeSplit<Scalar> s;
  s.range_part = DenseVector<Scalar>::Zero(x.size());
  s.costar_part = DenseVector<Scalar>::Zero(x.size());
  if (c.h0.dim() > 0) {
    const DenseMatrix<Scalar> qr = metric_orthonormalize<Scalar>(c.a0, c.h1, rel_tol);
    s.range_part = qr * (qr.transpose() * (c.h1.gram * x));
  }
  if (c.h2.dim() > 0) {
    const DenseMatrix<Scalar> costar =
        adjoint_matrix(c.a1, c.h1, c.h2);  // columns span range(a1*)
    const DenseMatrix<Scalar> qc = metric_orthonormalize<Scalar>(costar, c.h1, rel_tol);
    s.costar_part = qc * (qc.transpose() * (c.h1.gram * x));
  }
  s.harmonic_part = x - s.range_part - s.costar_part;
  return s;
}

// Rayleigh bounds of a G-self-adjoint positive weight operator eps on a
// metric space: under = 1/sqrt(min), over = sqrt(max), hat = max(under, over),
// where min and max are the extreme eigenvalues of eps.
template <typename Scalar>
WeightBounds<Scalar> weight_bounds(const DenseMatrix<Scalar>& eps,
                                   const MetricSpace<Scalar>& space) {
  using std::sqrt;
  DenseMatrix<Scalar> w = space.gram * eps;
  w = ((w + w.transpose()) / Scalar(2)).eval();
  const DenseMatrix<Scalar> g = inverse_sqrt(space.gram);
  DenseMatrix<Scalar> b = g * w * g;
  b = ((b + b.transpose()) / Scalar(2)).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(b);
  const Scalar lo = es.eigenvalues().minCoeff();
  const Scalar hi = es.eigenvalues().maxCoeff();
  if (lo <= Scalar(0)) throw std::invalid_argument("weight_bounds: weight must be positive");
  WeightBounds<Scalar> out;
  out.under = Scalar(1) / sqrt(lo);
  out.over = sqrt(hi);
  out.hat = std::max(out.under, out.over);
  return out;
}

// Same complex with the middle inner product changed to <eps u, v>_G1.
template <typename Scalar>
ComplexPair<Scalar> weighted_complex(const ComplexPair<Scalar>& c,
                                     const DenseMatrix<Scalar>& eps) {
  ComplexPair<Scalar> out = c;
  DenseMatrix<Scalar> g = c.h1.gram * eps;
  out.h1.gram = ((g + g.transpose()) / Scalar(2)).eval();
  return out;
}

// --- randomized instances -------------------------------------------------

// SPD Gram matrix Q^T D Q with spectrum log-uniform in [lo, hi].
template <typename Scalar>
MetricSpace<Scalar> random_metric(Rng& rng, Eigen::Index n, double lo = 0.1,
                                  double hi = 10.0) {
  DenseMatrix<Scalar> g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Scalar(rng.gaussian());
  const Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(g);
  const DenseMatrix<Scalar> q = qr.householderQ();
  DenseVector<Scalar> d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = Scalar(rng.log_uniform(lo, hi));
  DenseMatrix<Scalar> gram = q.transpose() * d.asDiagonal() * q;
  return {((gram + gram.transpose()) / Scalar(2)).eval()};
}

// Random complex with Gaussian a0 and a1 killed on range(a0), so a1 a0 = 0 to
// rounding. Metrics are random SPD with moderate condition numbers.
template <typename Scalar>
ComplexPair<Scalar> random_complex(Rng& rng, Eigen::Index n0, Eigen::Index n1,
                                   Eigen::Index n2) {
  if (n1 <= 0 || n0 < 0 || n2 < 0) throw std::invalid_argument("random_complex: bad dims");
  ComplexPair<Scalar> c;
  c.a0.resize(n1, n0);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n0; ++j) c.a0(i, j) = Scalar(rng.gaussian());
  DenseMatrix<Scalar> b(n2, n1);
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = 0; j < n1; ++j) b(i, j) = Scalar(rng.gaussian());
  Eigen::Index first_rank = 0;
  DenseMatrix<Scalar> proj = DenseMatrix<Scalar>::Zero(n1, n1);
  if (n0 > 0) {
    const MetricSpace<Scalar> euclid = MetricSpace<Scalar>::standard(n1);
    const DenseMatrix<Scalar> u = metric_orthonormalize<Scalar>(c.a0, euclid);
    first_rank = u.cols();
    proj = u * u.transpose();
  }
  // A surjective first map forces the second one to vanish; snap it to an
  // exact zero so the complex does not carry a roundoff-sized ghost operator.
  if (first_rank == n1)
    c.a1 = DenseMatrix<Scalar>::Zero(n2, n1);
  else
    c.a1 = b * (DenseMatrix<Scalar>::Identity(n1, n1) - proj);
  c.h0 = random_metric<Scalar>(rng, n0);
  c.h1 = random_metric<Scalar>(rng, n1);
  c.h2 = random_metric<Scalar>(rng, n2);
  return c;
}

// Random G-self-adjoint positive weight on a space: G^-1 W with W SPD, so the
// weighted pairing <eps u, v>_G = u^T W v stays symmetric positive definite.
template <typename Scalar>
DenseMatrix<Scalar> random_weight(Rng& rng, const MetricSpace<Scalar>& space, double lo = 0.2,
                                  double hi = 5.0) {
  const MetricSpace<Scalar> w = random_metric<Scalar>(rng, space.dim(), lo, hi);
  return space.gram.llt().solve(w.gram);
}

}  // namespace derham
