#include "derham/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace derham {

QuadratureRule gauss_legendre(int points, double a, double b) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-type initial guess, then Newton on P_n(x).
    double x = std::cos(M_PI * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;  // the guesses sweep from the right; store ascending
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  // Affine map [-1,1] -> [a,b].
  const double mid = 0.5 * (a + b), len = 0.5 * (b - a);
  rule.nodes = (mid + len * rule.nodes.array()).matrix();
  rule.weights *= len;
  return rule;
}

double integrate_box(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     int points_per_axis) {
  const int n = static_cast<int>(lo.size());
  if (hi.size() != n || n < 1) throw std::invalid_argument("integrate_box: bad box");
  std::vector<QuadratureRule> rules;
  rules.reserve(n);
  for (int a = 0; a < n; ++a) rules.push_back(gauss_legendre(points_per_axis, lo[a], hi[a]));

  Eigen::VectorXd x(n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      x[a] = rules[static_cast<std::size_t>(a)].nodes[idx[static_cast<std::size_t>(a)]];
      w *= rules[static_cast<std::size_t>(a)].weights[idx[static_cast<std::size_t>(a)]];
    }
    sum += w * f(x);
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == points_per_axis) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return sum;
}

}  // namespace derham
