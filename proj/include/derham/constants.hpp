#pragma once

// Best constants of the discrete complex on a box grid: the Friedrichs and
// Poincare constants, the constants of the single exterior-derivative legs
// (with the weight on either side), and the combined constant whose operator
// adds the derivative leg and the weighted codifferential leg. Each constant
// is 1/sqrt of the smallest positive eigenvalue of a symmetric pencil; the
// verify_* functions evaluate the identities and two-sided bounds tying the
// constants together and report them as named inequality records.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

#include "derham/box_grid.hpp"
#include "derham/eigensolve.hpp"
#include "derham/grid_operators.hpp"

namespace derham {

struct SolveOptions {
  long dense_limit = 3000;  // at or below: dense full-spectrum route
  double tol = 1e-9;        // iterative residual target
  int max_iter = 2000;
  std::uint64_t seed = 0x6a09e667f3bcc909ULL;
  // Iterative solves on single-leg pencils add the scaled complementary leg
  // to push the huge null space away from zero; the returned vector is then
  // certified to live on the wanted branch.
  double penalty_beta = 64.0;
  int penalty_retries = 3;
  double branch_leak_tol = 1e-8;
};

struct ConstantValue {
  double constant = 0.0;    // 1/sqrt(eigenvalue), +inf for zero maps
  double eigenvalue = 0.0;  // smallest positive pencil eigenvalue
  long kernel_dim = 0;      // zero modes counted (dense) or deflated (iterative)
  bool stable = true;       // solver converged and kernel dimension as expected
  bool via_dense = true;
  double residual = 0.0;
  int iterations = 0;
};

// Which side of the derivative leg carries the weight.
enum class WeightSide { domain, codomain };

struct CheckRecord {
  std::string name;
  double lhs = 0.0, rhs = 0.0;  // checked as lhs <= rhs
  double slack = 0.0;           // rhs - lhs
  bool holds = false;
};

// Pencil of the derivative leg at degree q:
//   domain weight:    D_q^T M_{q+1} D_q   vs  M_q(eps)
//   codomain weight:  D_q^T M_{q+1}(eps) D_q  vs  M_q.
SymmetricPencil dq_pencil(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                          WeightSide side, BoundaryCondition bc = BoundaryCondition::tangential);

// Combined pencil at degree q (weight on the middle space):
//   D_q^T M_{q+1} D_q + M_q(eps) D_{q-1} M_{q-1}^-1 D_{q-1}^T M_q(eps)  vs  M_q(eps),
// with the absent leg dropped at the end degrees.
SymmetricPencil maxwell_pencil(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                               BoundaryCondition bc = BoundaryCondition::tangential);

// Basis of the null space of the combined pencil (the discrete harmonic
// cochains in the weighted metric). Empty matrix when the expected dimension
// is zero.
Eigen::MatrixXd harmonic_kernel_basis(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                      BoundaryCondition bc = BoundaryCondition::tangential);

// Null-space dimension of the derivative-leg pencil at degree q (by exactness
// of the complex, a telescoping count over the lower degrees).
long dq_kernel_dim(const BoxGrid& grid, int q, BoundaryCondition bc);

// Smallest Dirichlet eigenvalue route: degree-0 derivative leg on the
// tangential complex. constant = 1/sqrt(lambda_1).
ConstantValue friedrichs_constant(const BoxGrid& grid, const SolveOptions& opt = {});

// Smallest nonzero Neumann eigenvalue route: the codifferential leg on top
// cochains (cell averages), whose kernel is the constant cochain.
// constant = 1/sqrt(mu_2).
ConstantValue poincare_constant(const BoxGrid& grid, const SolveOptions& opt = {});

// Best constant of one derivative leg, weight on the chosen side.
ConstantValue dq_constant(const BoxGrid& grid, int q, const EpsilonWeight& eps, WeightSide side,
                          const SolveOptions& opt = {},
                          BoundaryCondition bc = BoundaryCondition::tangential);

// Best constant of the combined operator at degree q, tangential complex.
ConstantValue maxwell_constant_tangential(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                          const SolveOptions& opt = {});

// Same with the complementary boundary condition, computed through the
// duality transport: degree N-q tangential with the inverse-conjugated weight.
ConstantValue maxwell_constant_normal(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                      const SolveOptions& opt = {});

// lambda_1 >= mu_2 (equivalently c_f <= c_p) on this grid.
CheckRecord eigenvalue_ordering(const BoxGrid& grid, const SolveOptions& opt = {});

// Combined constant equals the maximum of its two leg constants (legs that
// are zero maps are skipped).
CheckRecord verify_main_theorem(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                const SolveOptions& opt = {});

// The six two-sided bounds between weighted and unweighted constants at
// degree q, with the Rayleigh bounds of the weight.
std::vector<CheckRecord> verify_epsilon_sandwich(const BoxGrid& grid, int q,
                                                 const EpsilonWeight& eps,
                                                 const SolveOptions& opt = {});

// c_f / eps_hat <= combined constant at q <= c_p * eps_hat on this grid.
std::vector<CheckRecord> verify_chain(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                                      const SolveOptions& opt = {});

// Normal-condition constant at q against the transported tangential one.
CheckRecord verify_duality(const BoxGrid& grid, int q, const EpsilonWeight& eps,
                           const SolveOptions& opt = {});

}  // namespace derham
