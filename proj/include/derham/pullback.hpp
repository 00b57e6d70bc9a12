#pragma once

// Coordinate transformations and the transformation calculus of forms:
// pullbacks through the minor matrices of the Jacobian, the induced change of
// weights, finite-difference checks that pullback and exterior derivative
// commute, and the geometric constants (Frobenius norms, determinant ranges,
// adjugate ratios) that enter the one-chart bounds for the combined constant
// on a deformed domain.

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "derham/grid_operators.hpp"

namespace derham {

// Differentiable map on a parameter box [lo, hi]. `jacobian` returns
// J(xi) with J(a, b) = d phi_a / d xi_b; det J > 0 is required throughout.
// `exclude` (optional) marks points where J is discontinuous (chart creases),
// skipped by the finite-difference commutation checks.
struct Transform {
  int n_dim = 0;
  Eigen::VectorXd lo, hi;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> phi;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  std::function<bool(const Eigen::VectorXd&)> exclude;  // may be empty
  std::string label;

  static Transform identity(int n_dim);
  static Transform scaling(int n_dim, double factor);
  static Transform affine(Eigen::MatrixXd a, Eigen::VectorXd shift);
  // Unit-determinant two-piece shear on [0,2]x[0,1]: the identity left of
  // xi_1 = 1, then (xi_1, xi_2 + (xi_1 - 1)); the image is a nonconvex elbow.
  static Transform l_shape_chart();
  // phi(xi) = xi + amplitude * sin-based displacement, a smooth bijection of
  // the unit box onto itself for small amplitudes.
  static Transform sinusoidal_perturbation(int n_dim, double amplitude);
};

// Smooth q-form on a box: `components` returns the binom(n,q) coefficients in
// ascending axis-subset order; `gradient` (optional) returns the matrix of
// partials d_b (component_i) with one row per component, one column per axis.
struct SmoothForm {
  int n_dim = 0, q = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> components;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gradient;  // may be empty
};

// Degree-0 and top-degree forms from a scalar field.
SmoothForm scalar_form(int n_dim, int q, std::function<double(const Eigen::VectorXd&)> f);

// 3-D vector proxies: a vector field as a 1-form (components = v) or as a
// 2-form (v_0 dx_1^dx_2 - v_1 dx_0^dx_2 + v_2 dx_0^dx_1).
SmoothForm vector_proxy_one_form(std::function<Eigen::Vector3d(const Eigen::Vector3d&)> v);
SmoothForm vector_proxy_two_form(std::function<Eigen::Vector3d(const Eigen::Vector3d&)> v);

// Exterior derivative and codifferential of a form with an analytic gradient:
//   (d w)_K = sum_{a in K} sign(K\a, a) d_a w_{K\a},
//   (delta w)_J = sum_{a not in J} sign(J, a) d_a w_{J u a},
// with sign the insertion sign; the pairing identity <d u, v> = -<u, delta v>
// fixes the relative sign.
SmoothForm smooth_d(const SmoothForm& w);
SmoothForm smooth_codifferential(const SmoothForm& w);

// Pullback through a transform: (phi* w)_J(xi) = sum_I det(J(I rows, J cols)) w_I(phi(xi)),
// i.e. the degree-q minor matrix of the Jacobian applied to the components.
SmoothForm pullback(const Transform& t, const SmoothForm& w);
Eigen::VectorXd pullback_components(const Transform& t, const SmoothForm& w,
                                    const Eigen::VectorXd& xi);

// Finite-difference check that d(phi* w) = phi*(d w), with the analytic
// derivative `dw` supplied. Samples an interior lattice of the parameter box,
// differentiates the pulled-back components at steps eta and eta/2, and
// reports the worst relative mismatch at both steps plus the observed order.
struct CommutationReport {
  double residual_coarse = 0.0;
  double residual_fine = 0.0;
  double observed_order = 0.0;
  bool one_sided = false;  // some sample needed a one-sided stencil
  int samples = 0;
};
CommutationReport commutation_residual(const Transform& t, const SmoothForm& w,
                                       const SmoothForm& dw, double step = 0.0,
                                       int lattice_per_axis = 5);

// Geometry constants of a transform, sampled on an interior lattice:
// Frobenius norm and determinant ranges, the adjugate/determinant ratios, and
// the pullback norm constant at degree q,
//   c_q = N^q binom(N,q)^2 max|J|_F^(2q) / min det J.
struct TransformConstants {
  double max_jacobian_norm = 0.0;   // max |J|_F
  double min_det = 0.0, max_det = 0.0;
  double c_q = 0.0;
  double c_top = 0.0;               // N^(N/2) N!, degree-independent
  double c_det = 0.0;               // max sqrt(det J)
  double c_hat = 0.0;               // max |adj J|_F / sqrt(det J)
  double c_check = 0.0;             // max |J|_F / sqrt(det J)
};
TransformConstants transform_constants(const Transform& t, int q, int samples_per_axis = 9);

// Norm constant of a chart pair: max(max |J_phi|_F, max |J_psi|_F, 1)^N
// divided by min(min sqrt(det J_phi), min sqrt(det J_psi), 1).
double chart_pair_constant(const Transform& phi, const Transform& psi,
                           int samples_per_axis = 9);

// One-chart bounds on the combined constant of the image domain in terms of
// the parameter-box constant (3-D, degree 1):
//   refined: max(c_hat, c_check, c_det)^3 * eps_hat * c_p,
//   rough:   c_top^3 * chart_pair^3 * eps_hat * c_p.
double refined_one_chart_bound(const TransformConstants& tc, double eps_hat,
                               double poincare_parameter);
double rough_one_chart_bound(double c_top, double chart_pair, double eps_hat,
                             double poincare_parameter);

// Bounds for the uniformly scaled box (factor r, 3-D, degree 1):
//   sharp: sqrt(r) max(1, r)^2 * eps_hat * c_p,
//   crude: 3 sqrt(3) r^(3/2) max(1, r^2)^3 * eps_hat * c_p.
double scaling_bound_sharp(double r, double eps_hat, double poincare_parameter);
double scaling_bound_crude(double r, double eps_hat, double poincare_parameter);

// Weight seen on the parameter box after pulling a weighted problem back
// through an affine map with constant Jacobian `jac`:
//   mu = det(jac) * P^-T eps P^-1,  P the degree-q minor matrix.
// Scalar-field weights are supported for conformal Jacobians (P^T P
// proportional to the identity), constant weights always.
EpsilonWeight pullback_weight(const Eigen::MatrixXd& jac, int q, const EpsilonWeight& eps);

// Energies in the equality ||grad w||^2 = ||d w||^2 + ||delta w||^2 for
// compactly supported fields (an inequality under a single boundary
// condition on convex domains); integrated with tensor Gauss-Legendre.
struct GaffneyReport {
  double grad_energy = 0.0;
  double d_energy = 0.0;
  double delta_energy = 0.0;
  double defect = 0.0;  // grad - (d + delta)
};
GaffneyReport gaffney_energies(const SmoothForm& w, const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi, int points_per_axis = 24);

}  // namespace derham
