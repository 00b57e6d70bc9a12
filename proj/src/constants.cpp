#include "derham/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "derham/hodge_dual.hpp"

namespace derham {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// D_q^T M_{q+1}(w) D_q on the kept cells.
Eigen::SparseMatrix<double> d_leg(const BoxGrid& grid, int q, const EpsilonWeight& w,
                                  BoundaryCondition bc) {
  const Eigen::SparseMatrix<double> d = exterior_derivative(grid, q, bc);
  const Eigen::SparseMatrix<double> mw = mass_matrix(grid, q + 1, w, bc).to_sparse();
  return Eigen::SparseMatrix<double>(d.transpose() * (mw * d).eval());
}

// M_q(w) D_{q-1} M_{q-1}^-1 D_{q-1}^T M_q(w); the lower mass is unweighted,
// hence a multiple of the identity.
Eigen::SparseMatrix<double> delta_leg(const BoxGrid& grid, int q, const EpsilonWeight& w,
                                      BoundaryCondition bc) {
  const Eigen::SparseMatrix<double> d = exterior_derivative(grid, q - 1, bc);
  const Eigen::SparseMatrix<double> mw = mass_matrix(grid, q, w, bc).to_sparse();
  const double m_prev = std::pow(grid.spacing(), grid.n_dim() - 2 * (q - 1));
  Eigen::SparseMatrix<double> s(mw * d);
  Eigen::SparseMatrix<double> leg(s * Eigen::SparseMatrix<double>(s.transpose()));
  leg *= 1.0 / m_prev;
  return leg;
}

CheckRecord make_check(std::string name, double lhs, double rhs, bool stable,
                       double rel_slack = 1e-9) {
  CheckRecord c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  c.holds = stable && (lhs <= rhs + rel_slack * scale);
  if (std::isinf(lhs) && std::isinf(rhs) && lhs > 0 && rhs > 0) c.holds = stable;
  return c;
}

// Solve for the smallest positive eigenvalue of `plain`. `kernel` spans the
// pencil's null space (deflated on the iterative route); `complementary`, if
// given, is added scaled on the iterative route to push a large null space
// into the positive spectrum, with a branch certificate on the result.
ConstantValue solve_constant(const SymmetricPencil& plain, const Eigen::MatrixXd& kernel,
                             long expected_kernel, const SolveOptions& opt,
                             const Eigen::SparseMatrix<double>* complementary) {
  const long n = plain.k.rows();
  ConstantValue out;
  if (n == 0) {
    out.constant = kInf;
    return out;
  }

  if (n <= opt.dense_limit) {
    const EigResult r = dense_solve(plain, false, 1e-10);
    out.via_dense = true;
    out.kernel_dim = r.kernel_dim;
    out.stable = (expected_kernel < 0) || (r.kernel_dim == expected_kernel);
    if (r.kernel_dim >= n) {
      out.constant = kInf;
      out.eigenvalue = 0.0;
      return out;
    }
    out.eigenvalue = r.values[r.kernel_dim];
    out.constant = 1.0 / std::sqrt(out.eigenvalue);
    return out;
  }

  out.via_dense = false;
  double beta = opt.penalty_beta;
  EigOptions eo;
  eo.tol = opt.tol;
  eo.max_iter = opt.max_iter;
  eo.seed = opt.seed;
  for (int attempt = 0; attempt < std::max(1, opt.penalty_retries); ++attempt) {
    SymmetricPencil work;
    work.m = plain.m;
    work.k = plain.k;
    if (complementary) work.k = plain.k + Eigen::SparseMatrix<double>(beta * *complementary);

    const long expected_work = complementary ? -1 : expected_kernel;
    const EigResult r = smallest_nonzero(work, kernel, expected_work, eo);
    out.iterations += r.iterations;
    out.kernel_dim = complementary ? expected_kernel : kernel.cols();
    if (!r.converged || r.values.size() == 0) {
      out.stable = false;
      if (r.values.size()) {
        out.eigenvalue = r.values[0];
        out.constant = 1.0 / std::sqrt(std::max(out.eigenvalue, 1e-300));
        out.residual = r.residuals[0];
      }
      return out;
    }

    const Eigen::VectorXd v = r.vectors.col(0);
    const double vmv = plain.m.inner(v, v);
    const Eigen::VectorXd kv = plain.k * v;
    const double theta = v.dot(kv) / vmv;
    double leak = 0.0;
    if (complementary)
      leak = beta * v.dot(Eigen::VectorXd(*complementary * v)) /
             (vmv * std::max(theta, 1e-300));
    if (complementary && leak > opt.branch_leak_tol) {
      beta *= 16.0;  // wrong branch captured; push it further away
      continue;
    }
    const Eigen::VectorXd mv = plain.m.apply(v);
    const double denom = kv.norm() + std::abs(theta) * mv.norm();
    out.eigenvalue = theta;
    out.constant = 1.0 / std::sqrt(theta);
    out.residual = (kv - theta * mv).norm() / std::max(denom, 1e-300);
    out.stable = !r.kernel_mismatch && out.residual <= 100.0 * opt.tol;
    return out;
  }
  out.stable = false;  // branch certificate kept failing
  return out;
}

EpsilonWeight identity_weight() { return EpsilonWeight::identity(); }

}  // namespace

SymmetricPencil dq_pencil(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                          WeightSide side, BoundaryCondition bc) {
  if (q < 0 || q >= grid.n_dim())
    throw std::invalid_argument("dq_pencil: degree must satisfy 0 <= q < N");
  SymmetricPencil p;
  if (side == WeightSide::domain) {
    p.k = d_leg(grid, q, identity_weight(), bc);
    p.m = mass_matrix(grid, q, eps, bc);
  } else {
    p.k = d_leg(grid, q, eps, bc);
    p.m = mass_matrix(grid, q, identity_weight(), bc);
  }
  return p;
}

SymmetricPencil maxwell_pencil(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                               BoundaryCondition bc) {
  const int n = grid.n_dim();
  if (q < 0 || q > n) throw std::invalid_argument("maxwell_pencil: bad degree");
  SymmetricPencil p;
  p.m = mass_matrix(grid, q, eps, bc);
  const long count = grid.cell_count(q, bc);
  p.k.resize(count, count);
  if (q < n) p.k = d_leg(grid, q, identity_weight(), bc);
  if (q > 0) {
    const Eigen::SparseMatrix<double> lower = delta_leg(grid, q, eps, bc);
    p.k = (q < n) ? Eigen::SparseMatrix<double>(p.k + lower) : lower;
  }
  return p;
}

Eigen::MatrixXd harmonic_kernel_basis(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                      BoundaryCondition bc) {
  const long count = grid.cell_count(q, bc);
  const int dim = grid.expected_harmonic_dim(q, bc);
  if (dim == 0) return Eigen::MatrixXd(count, 0);
  // On a box the only nontrivial harmonic spaces are one-dimensional: the
  // constants at degree zero (free complex) and, tangentially, the weighted
  // preimage of the constants at the top degree.
  if (bc == BoundaryCondition::tangential && q == grid.n_dim()) {
    const MassMatrix m = mass_matrix(grid, q, eps, bc);
    Eigen::MatrixXd basis(count, 1);
    basis.col(0) = m.solve(Eigen::VectorXd(Eigen::VectorXd::Ones(count)));
    return basis;
  }
  if (bc == BoundaryCondition::none && q == 0) return Eigen::MatrixXd::Ones(count, 1);
  throw std::logic_error("harmonic_kernel_basis: unexpected harmonic space");
}

long dq_kernel_dim(const BoxGrid& grid, int q, BoundaryCondition bc) {
  if (q < 0 || q > grid.n_dim()) throw std::invalid_argument("dq_kernel_dim: bad degree");
  long k = grid.expected_harmonic_dim(0, bc);
  for (int j = 1; j <= q; ++j)
    k = (grid.cell_count(j - 1, bc) - k) + grid.expected_harmonic_dim(j, bc);
  return k;
}

ConstantValue friedrichs_constant(const BoxGrid& grid, const SolveOptions& opt) {
  return dq_constant(grid, 0, identity_weight(), WeightSide::domain, opt,
                     BoundaryCondition::tangential);
}

ConstantValue poincare_constant(const BoxGrid& grid, const SolveOptions& opt) {
  return maxwell_constant_tangential(grid, grid.n_dim(), identity_weight(), opt);
}

ConstantValue dq_constant(const BoxGrid& grid, int q, const EpsilonWeight& eps, WeightSide side,
                          const SolveOptions& opt, BoundaryCondition bc) {
  const SymmetricPencil p = dq_pencil(grid, q, eps, side, bc);
  const long kernel_dim = dq_kernel_dim(grid, q, bc);
  const long n = p.k.rows();

  if (kernel_dim == 0 || n <= opt.dense_limit)
    return solve_constant(p, Eigen::MatrixXd(n, 0), kernel_dim, opt, nullptr);

  if (q == 0) {
    // Free complex at degree zero: the kernel is the constants; deflate it.
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
    return solve_constant(p, ones, kernel_dim, opt, nullptr);
  }

  // Large null space N(D_q): add the scaled complementary leg, whose kernel
  // meets it only in the harmonic space (empty at these degrees).
  const EpsilonWeight mass_weight = (side == WeightSide::domain) ? eps : identity_weight();
  const Eigen::SparseMatrix<double> comp = delta_leg(grid, q, mass_weight, bc);
  const long harmonic = grid.expected_harmonic_dim(q, bc);
  Eigen::MatrixXd kernel(n, 0);
  if (harmonic > 0) kernel = harmonic_kernel_basis(grid, q, mass_weight, bc);
  return solve_constant(p, kernel, harmonic, opt, &comp);
}

ConstantValue maxwell_constant_tangential(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                          const SolveOptions& opt) {
  const BoundaryCondition bc = BoundaryCondition::tangential;
  const SymmetricPencil p = maxwell_pencil(grid, q, eps, bc);
  const Eigen::MatrixXd kernel = harmonic_kernel_basis(grid, q, eps, bc);
  return solve_constant(p, kernel, grid.expected_harmonic_dim(q, bc), opt, nullptr);
}

ConstantValue maxwell_constant_normal(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                      const SolveOptions& opt) {
  const EpsilonWeight mu = dual_weight(grid, q, eps);
  return maxwell_constant_tangential(grid, grid.n_dim() - q, mu, opt);
}

CheckRecord eigenvalue_ordering(const BoxGrid& grid, const SolveOptions& opt) {
  const ConstantValue dirichlet = friedrichs_constant(grid, opt);
  const ConstantValue neumann = poincare_constant(grid, opt);
  return make_check("mu_2 <= lambda_1", neumann.eigenvalue, dirichlet.eigenvalue,
                    dirichlet.stable && neumann.stable);
}

CheckRecord verify_main_theorem(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                const SolveOptions& opt) {
  const int n = grid.n_dim();
  const ConstantValue direct = maxwell_constant_tangential(grid, q, eps, opt);
  bool stable = direct.stable;
  double from_legs = -kInf;
  bool any_leg = false;
  if (q >= 1) {
    const ConstantValue leg = dq_constant(grid, q - 1, eps, WeightSide::codomain, opt);
    stable = stable && leg.stable;
    if (std::isfinite(leg.constant)) {
      from_legs = std::max(from_legs, leg.constant);
      any_leg = true;
    }
  }
  if (q <= n - 1) {
    const ConstantValue leg = dq_constant(grid, q, eps, WeightSide::domain, opt);
    stable = stable && leg.stable;
    if (std::isfinite(leg.constant)) {
      from_legs = std::max(from_legs, leg.constant);
      any_leg = true;
    }
  }
  if (!any_leg) from_legs = kInf;  // both legs vanish

  double diff;
  double tol;
  if (std::isinf(direct.constant) && std::isinf(from_legs)) {
    diff = 0.0;
    tol = 0.0;
  } else {
    diff = std::abs(direct.constant - from_legs);
    tol = 1e-7 * std::max(1.0, std::abs(from_legs));
  }
  return make_check("|combined - max(leg constants)| <= 1e-7 * scale", diff, tol, stable, 0.0);
}

std::vector<CheckRecord> verify_epsilon_sandwich(const BoxGrid& grid, int q,
                                                 const EpsilonWeight& eps,
                                                 const SolveOptions& opt) {
  const int n = grid.n_dim();
  if (q < 0 || q > n) throw std::invalid_argument("verify_epsilon_sandwich: bad degree");
  const EpsilonBounds b = epsilon_bounds(grid, q, eps);
  std::vector<CheckRecord> out;
  const std::string qs = std::to_string(q);
  const std::string ps = std::to_string(q - 1);

  double lo_leg = kInf, hi_leg = -kInf;
  bool legs_stable = true;
  if (q >= 1) {
    const ConstantValue prev = dq_constant(grid, q - 1, identity_weight(), WeightSide::domain, opt);
    const ConstantValue tilde = dq_constant(grid, q - 1, eps, WeightSide::codomain, opt);
    const bool st = prev.stable && tilde.stable;
    legs_stable = legs_stable && st;
    lo_leg = std::min(lo_leg, prev.constant);
    hi_leg = std::max(hi_leg, prev.constant);
    out.push_back(make_check("C_" + ps + "/eps_over <= C~_" + ps + "(eps)",
                             prev.constant / b.over, tilde.constant, st));
    out.push_back(make_check("C~_" + ps + "(eps) <= C_" + ps + "*eps_under",
                             tilde.constant, prev.constant * b.under, st));
  }
  if (q <= n - 1) {
    const ConstantValue plain = dq_constant(grid, q, identity_weight(), WeightSide::domain, opt);
    const ConstantValue weighted = dq_constant(grid, q, eps, WeightSide::domain, opt);
    const bool st = plain.stable && weighted.stable;
    legs_stable = legs_stable && st;
    lo_leg = std::min(lo_leg, plain.constant);
    hi_leg = std::max(hi_leg, plain.constant);
    out.push_back(make_check("C_" + qs + "/eps_under <= C_" + qs + "(eps)",
                             plain.constant / b.under, weighted.constant, st));
    out.push_back(make_check("C_" + qs + "(eps) <= C_" + qs + "*eps_over",
                             weighted.constant, plain.constant * b.over, st));
  }
  const ConstantValue combined = maxwell_constant_tangential(grid, q, eps, opt);
  const bool st = legs_stable && combined.stable;
  out.push_back(make_check("min(leg constants)/eps_hat <= C_t^" + qs + "(eps)",
                           lo_leg / b.hat, combined.constant, st));
  out.push_back(make_check("C_t^" + qs + "(eps) <= max(leg constants)*eps_hat",
                           combined.constant, hi_leg * b.hat, st));
  return out;
}

std::vector<CheckRecord> verify_chain(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                      const SolveOptions& opt) {
  const EpsilonBounds b = epsilon_bounds(grid, q, eps);
  const ConstantValue cf = friedrichs_constant(grid, opt);
  const ConstantValue cp = poincare_constant(grid, opt);
  const ConstantValue ct = maxwell_constant_tangential(grid, q, eps, opt);
  const bool stable = cf.stable && cp.stable && ct.stable;
  const std::string qs = std::to_string(q);
  std::vector<CheckRecord> out;
  out.push_back(make_check("c_f/eps_hat <= C_t^" + qs + "(eps)", cf.constant / b.hat,
                           ct.constant, stable));
  out.push_back(make_check("C_t^" + qs + "(eps) <= c_p*eps_hat", ct.constant,
                           cp.constant * b.hat, stable));
  return out;
}

CheckRecord verify_duality(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                           const SolveOptions& opt) {
  const ConstantValue normal = maxwell_constant_normal(grid, q, eps, opt);
  const ConstantValue tangential =
      maxwell_constant_tangential(grid, grid.n_dim() - q, dual_weight(grid, q, eps), opt);
  const double scale = std::max(1.0, std::abs(tangential.constant));
  return make_check("|C_n^" + std::to_string(q) + "(eps) - C_t^" +
                        std::to_string(grid.n_dim() - q) + "(dual eps)| <= 1e-10 * scale",
                    std::abs(normal.constant - tangential.constant), 1e-10 * scale,
                    normal.stable && tangential.stable, 0.0);
}

}  // namespace derham
