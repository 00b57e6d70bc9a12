#pragma once

// Gauss-Legendre quadrature: 1-D rules by Newton iteration on the Legendre
// polynomials, and tensor-product integration over an axis-aligned box.

#include <Eigen/Dense>

#include <functional>

namespace derham {

struct QuadratureRule {
  Eigen::VectorXd nodes, weights;
};

// `points`-point Gauss-Legendre rule on [a, b]; exact through degree 2*points-1.
QuadratureRule gauss_legendre(int points, double a = -1.0, double b = 1.0);

// Tensor-product integral of f over the box [lo, hi].
double integrate_box(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     int points_per_axis);

}  // namespace derham
