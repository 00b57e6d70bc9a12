#include "derham/pullback.hpp"

#include <cmath>
#include <stdexcept>

#include "derham/combinatorics.hpp"
#include "derham/quadrature.hpp"

namespace derham {

namespace {

Eigen::VectorXd unit_lo(int n) { return Eigen::VectorXd::Zero(n); }
Eigen::VectorXd unit_hi(int n) { return Eigen::VectorXd::Ones(n); }

}  // namespace

Transform Transform::identity(int n_dim) {
  Transform t;
  t.n_dim = n_dim;
  t.lo = unit_lo(n_dim);
  t.hi = unit_hi(n_dim);
  t.phi = [](const Eigen::VectorXd& xi) { return xi; };
  t.jacobian = [n_dim](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(n_dim, n_dim);
  };
  t.label = "identity";
  return t;
}

Transform Transform::scaling(int n_dim, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("Transform::scaling: factor must be positive");
  Transform t;
  t.n_dim = n_dim;
  t.lo = unit_lo(n_dim);
  t.hi = unit_hi(n_dim);
  t.phi = [factor](const Eigen::VectorXd& xi) { return (factor * xi).eval(); };
  t.jacobian = [n_dim, factor](const Eigen::VectorXd&) {
    return (factor * Eigen::MatrixXd::Identity(n_dim, n_dim)).eval();
  };
  t.label = "scaling(" + std::to_string(factor) + ")";
  return t;
}

Transform Transform::affine(Eigen::MatrixXd a, Eigen::VectorXd shift) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || shift.size() != n)
    throw std::invalid_argument("Transform::affine: shape mismatch");
  if (!(a.determinant() > 0.0))
    throw std::invalid_argument("Transform::affine: need positive determinant");
  Transform t;
  t.n_dim = n;
  t.lo = unit_lo(n);
  t.hi = unit_hi(n);
  t.phi = [a, shift](const Eigen::VectorXd& xi) { return (a * xi + shift).eval(); };
  t.jacobian = [a](const Eigen::VectorXd&) { return a; };
  t.label = "affine";
  return t;
}

Transform Transform::l_shape_chart() {
  Transform t;
  t.n_dim = 2;
  t.lo = Eigen::VectorXd::Zero(2);
  t.hi.resize(2);
  t.hi << 2.0, 1.0;
  t.phi = [](const Eigen::VectorXd& xi) {
    Eigen::VectorXd y = xi;
    y[1] += std::max(0.0, xi[0] - 1.0);
    return y;
  };
  t.jacobian = [](const Eigen::VectorXd& xi) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2, 2);
    if (xi[0] > 1.0) j(1, 0) = 1.0;
    return j;
  };
  t.exclude = [](const Eigen::VectorXd& xi) { return std::abs(xi[0] - 1.0) < 0.05; };
  t.label = "l-shape-chart";
  return t;
}

Transform Transform::sinusoidal_perturbation(int n_dim, double amplitude) {
  Transform t;
  t.n_dim = n_dim;
  t.lo = unit_lo(n_dim);
  t.hi = unit_hi(n_dim);
  t.phi = [amplitude, n_dim](const Eigen::VectorXd& xi) {
    double s = amplitude;
    for (int a = 0; a < n_dim; ++a) s *= std::sin(M_PI * xi[a]);
    return (xi.array() + s).matrix().eval();
  };
  t.jacobian = [amplitude, n_dim](const Eigen::VectorXd& xi) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n_dim, n_dim);
    for (int b = 0; b < n_dim; ++b) {
      double ds = amplitude * M_PI * std::cos(M_PI * xi[b]);
      for (int c = 0; c < n_dim; ++c)
        if (c != b) ds *= std::sin(M_PI * xi[c]);
      for (int a = 0; a < n_dim; ++a) j(a, b) += ds;
    }
    return j;
  };
  t.label = "sinusoidal(" + std::to_string(amplitude) + ")";
  return t;
}

SmoothForm scalar_form(int n_dim, int q, std::function<double(const Eigen::VectorXd&)> f) {
  if (q != 0 && q != n_dim)
    throw std::invalid_argument("scalar_form: degree must be 0 or the dimension");
  SmoothForm w;
  w.n_dim = n_dim;
  w.q = q;
  w.components = [f](const Eigen::VectorXd& x) {
    Eigen::VectorXd c(1);
    c[0] = f(x);
    return c;
  };
  return w;
}

SmoothForm vector_proxy_one_form(std::function<Eigen::Vector3d(const Eigen::Vector3d&)> v) {
  SmoothForm w;
  w.n_dim = 3;
  w.q = 1;
  w.components = [v](const Eigen::VectorXd& x) { return Eigen::VectorXd(v(x)); };
  return w;
}

SmoothForm vector_proxy_two_form(std::function<Eigen::Vector3d(const Eigen::Vector3d&)> v) {
  SmoothForm w;
  w.n_dim = 3;
  w.q = 2;
  w.components = [v](const Eigen::VectorXd& x) {
    const Eigen::Vector3d val = v(x);
    Eigen::VectorXd c(3);  // subsets {0,1}, {0,2}, {1,2}
    c << val[2], -val[1], val[0];
    return c;
  };
  return w;
}

SmoothForm smooth_d(const SmoothForm& w) {
  if (!w.gradient) throw std::invalid_argument("smooth_d: form has no gradient callable");
  if (w.q >= w.n_dim) throw std::invalid_argument("smooth_d: top-degree form");
  const int n = w.n_dim;
  const auto upper = axis_subsets(n, w.q + 1);
  SmoothForm out;
  out.n_dim = n;
  out.q = w.q + 1;
  out.components = [w, n, upper](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd g = w.gradient(x);
    Eigen::VectorXd c(static_cast<Eigen::Index>(upper.size()));
    for (std::size_t k = 0; k < upper.size(); ++k) {
      double sum = 0.0;
      for (int a = 0; a < n; ++a) {
        if (!(upper[k] & (1u << a))) continue;
        const std::uint32_t without = upper[k] & ~(1u << a);
        sum += insertion_sign(without, a) * g(subset_rank(n, without), a);
      }
      c[static_cast<Eigen::Index>(k)] = sum;
    }
    return c;
  };
  return out;
}

SmoothForm smooth_codifferential(const SmoothForm& w) {
  if (!w.gradient)
    throw std::invalid_argument("smooth_codifferential: form has no gradient callable");
  if (w.q <= 0) throw std::invalid_argument("smooth_codifferential: degree-0 form");
  const int n = w.n_dim;
  const auto lower = axis_subsets(n, w.q - 1);
  SmoothForm out;
  out.n_dim = n;
  out.q = w.q - 1;
  out.components = [w, n, lower](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd g = w.gradient(x);
    Eigen::VectorXd c(static_cast<Eigen::Index>(lower.size()));
    for (std::size_t k = 0; k < lower.size(); ++k) {
      double sum = 0.0;
      for (int a = 0; a < n; ++a) {
        if (lower[k] & (1u << a)) continue;
        const std::uint32_t with = lower[k] | (1u << a);
        sum += insertion_sign(lower[k], a) * g(subset_rank(n, with), a);
      }
      c[static_cast<Eigen::Index>(k)] = sum;
    }
    return c;
  };
  return out;
}

Eigen::VectorXd pullback_components(const Transform& t, const SmoothForm& w,
                                    const Eigen::VectorXd& xi) {
  return minor_matrix(t.jacobian(xi), w.q) * w.components(t.phi(xi));
}

SmoothForm pullback(const Transform& t, const SmoothForm& w) {
  SmoothForm out;
  out.n_dim = t.n_dim;
  out.q = w.q;
  out.components = [t, w](const Eigen::VectorXd& xi) { return pullback_components(t, w, xi); };
  return out;
}

namespace {

// Finite-difference exterior derivative of the pulled-back form at xi, all
// degree-(q+1) components, clipped to the box with one-sided fallbacks.
Eigen::VectorXd fd_exterior_derivative(const Transform& t, const SmoothForm& w,
                                       const Eigen::VectorXd& xi, double eta,
                                       bool* one_sided) {
  const int n = t.n_dim;
  const auto upper = axis_subsets(n, w.q + 1);
  // Per axis, the differenced pulled-back components.
  Eigen::MatrixXd diff(binomial(n, w.q), n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd fwd = xi, bwd = xi;
    fwd[a] += eta;
    bwd[a] -= eta;
    const bool f_in = fwd[a] <= t.hi[a], b_in = bwd[a] >= t.lo[a];
    if (f_in && b_in) {
      diff.col(a) =
          (pullback_components(t, w, fwd) - pullback_components(t, w, bwd)) / (2.0 * eta);
    } else if (f_in) {
      diff.col(a) = (pullback_components(t, w, fwd) - pullback_components(t, w, xi)) / eta;
      if (one_sided) *one_sided = true;
    } else {
      diff.col(a) = (pullback_components(t, w, xi) - pullback_components(t, w, bwd)) / eta;
      if (one_sided) *one_sided = true;
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(upper.size()));
  for (std::size_t k = 0; k < upper.size(); ++k) {
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      if (!(upper[k] & (1u << a))) continue;
      const std::uint32_t without = upper[k] & ~(1u << a);
      sum += insertion_sign(without, a) * diff(subset_rank(n, without), a);
    }
    out[static_cast<Eigen::Index>(k)] = sum;
  }
  return out;
}

// Interior sample lattice of the parameter box, exclusion-aware.
std::vector<Eigen::VectorXd> sample_lattice(const Transform& t, int per_axis, double margin) {
  const int n = t.n_dim;
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Eigen::VectorXd xi(n);
    for (int a = 0; a < n; ++a) {
      const double frac = (idx[static_cast<std::size_t>(a)] + 0.5) / per_axis;
      xi[a] = t.lo[a] + frac * (t.hi[a] - t.lo[a]);
    }
    bool keep = true;
    if (t.exclude) {
      keep = !t.exclude(xi);
      for (int a = 0; keep && a < n; ++a) {
        Eigen::VectorXd shift = xi;
        shift[a] = xi[a] + margin;
        keep = keep && !t.exclude(shift);
        shift[a] = xi[a] - margin;
        keep = keep && !t.exclude(shift);
      }
    }
    if (keep) pts.push_back(xi);
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == per_axis) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return pts;
}

}  // namespace

CommutationReport commutation_residual(const Transform& t, const SmoothForm& w,
                                       const SmoothForm& dw, double step,
                                       int lattice_per_axis) {
  if (dw.q != w.q + 1 || dw.n_dim != w.n_dim)
    throw std::invalid_argument("commutation_residual: derivative degree mismatch");
  const double min_side = (t.hi - t.lo).minCoeff();
  const double eta = (step > 0.0) ? step : 1e-4 * min_side;

  CommutationReport rep;
  const auto pts = sample_lattice(t, lattice_per_axis, 2.0 * eta);
  rep.samples = static_cast<int>(pts.size());

  double scale = 1.0;
  std::vector<Eigen::VectorXd> reference;
  reference.reserve(pts.size());
  for (const auto& xi : pts) {
    reference.push_back(pullback_components(t, dw, xi));
    scale = std::max(scale, reference.back().cwiseAbs().maxCoeff());
  }
  for (int level = 0; level < 2; ++level) {
    const double h = (level == 0) ? eta : eta / 2.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Eigen::VectorXd fd = fd_exterior_derivative(t, w, pts[i], h, &rep.one_sided);
      worst = std::max(worst, (fd - reference[i]).cwiseAbs().maxCoeff() / scale);
    }
    (level == 0 ? rep.residual_coarse : rep.residual_fine) = worst;
  }
  if (rep.residual_coarse > 0.0 && rep.residual_fine > 0.0)
    rep.observed_order = std::log2(rep.residual_coarse / rep.residual_fine);
  return rep;
}

TransformConstants transform_constants(const Transform& t, int q, int samples_per_axis) {
  const int n = t.n_dim;
  if (q < 0 || q > n) throw std::invalid_argument("transform_constants: bad degree");
  TransformConstants tc;
  tc.min_det = std::numeric_limits<double>::infinity();
  const auto pts = sample_lattice(t, samples_per_axis, 0.0);
  for (const auto& xi : pts) {
    const Eigen::MatrixXd j = t.jacobian(xi);
    const double det = j.determinant();
    if (!(det > 0.0))
      throw std::invalid_argument("transform_constants: Jacobian determinant not positive");
    const double fro = j.norm();
    const double adj_fro = adjugate(j).norm();
    tc.max_jacobian_norm = std::max(tc.max_jacobian_norm, fro);
    tc.min_det = std::min(tc.min_det, det);
    tc.max_det = std::max(tc.max_det, det);
    tc.c_hat = std::max(tc.c_hat, adj_fro / std::sqrt(det));
    tc.c_check = std::max(tc.c_check, fro / std::sqrt(det));
  }
  tc.c_det = std::sqrt(tc.max_det);
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  tc.c_top = std::pow(static_cast<double>(n), n / 2.0) * factorial;
  tc.c_q = std::pow(static_cast<double>(n), q) *
           static_cast<double>(binomial(n, q) * binomial(n, q)) *
           std::pow(tc.max_jacobian_norm, 2 * q) / tc.min_det;
  return tc;
}

double chart_pair_constant(const Transform& phi, const Transform& psi, int samples_per_axis) {
  const TransformConstants a = transform_constants(phi, 0, samples_per_axis);
  const TransformConstants b = transform_constants(psi, 0, samples_per_axis);
  const double top = std::pow(std::max({a.max_jacobian_norm, b.max_jacobian_norm, 1.0}),
                              phi.n_dim);
  const double bottom = std::min({std::sqrt(a.min_det), std::sqrt(b.min_det), 1.0});
  return top / bottom;
}

double refined_one_chart_bound(const TransformConstants& tc, double eps_hat,
                               double poincare_parameter) {
  const double lead = std::max({tc.c_hat, tc.c_check, tc.c_det});
  return lead * lead * lead * eps_hat * poincare_parameter;
}

double rough_one_chart_bound(double c_top, double chart_pair, double eps_hat,
                             double poincare_parameter) {
  return std::pow(c_top, 3) * std::pow(chart_pair, 3) * eps_hat * poincare_parameter;
}

double scaling_bound_sharp(double r, double eps_hat, double poincare_parameter) {
  const double m = std::max(1.0, r);
  return std::sqrt(r) * m * m * eps_hat * poincare_parameter;
}

double scaling_bound_crude(double r, double eps_hat, double poincare_parameter) {
  return 3.0 * std::sqrt(3.0) * std::pow(r, 1.5) * std::pow(std::max(1.0, r * r), 3) *
         eps_hat * poincare_parameter;
}

EpsilonWeight pullback_weight(const Eigen::MatrixXd& jac, int q, const EpsilonWeight& eps) {
  const int n = static_cast<int>(jac.rows());
  if (jac.cols() != n) throw std::invalid_argument("pullback_weight: square Jacobian required");
  const double det = jac.determinant();
  if (!(det > 0.0)) throw std::invalid_argument("pullback_weight: need positive determinant");
  const Eigen::MatrixXd p = minor_matrix(jac, q);
  const Eigen::MatrixXd pinv = p.inverse();

  switch (eps.kind) {
    case EpsilonWeight::Kind::identity: {
      Eigen::MatrixXd mu = det * (pinv.transpose() * pinv);
      return EpsilonWeight::constant_spd(mu);
    }
    case EpsilonWeight::Kind::scalar_field: {
      // Only meaningful when P^T P is a multiple of the identity, so the
      // transported weight stays scalar.
      const Eigen::MatrixXd ptp = p.transpose() * p;
      const double c = ptp.trace() / ptp.rows();
      if ((ptp - c * Eigen::MatrixXd::Identity(ptp.rows(), ptp.cols())).norm() >
          1e-12 * std::max(1.0, std::abs(c)))
        throw std::invalid_argument(
            "pullback_weight: scalar weight needs a conformal Jacobian at this degree");
      // The caller supplies the field already in parameter coordinates.
      auto f = eps.field;
      const double scale = det / c;
      return EpsilonWeight::scalar_field(
          [f, scale](const Eigen::VectorXd& xi) { return scale * f(xi); },
          "pullback(" + eps.label + ")");
    }
    case EpsilonWeight::Kind::constant_spd: {
      Eigen::MatrixXd mu = det * (pinv.transpose() * eps.matrix * pinv);
      return EpsilonWeight::constant_spd(0.5 * (mu + mu.transpose()));
    }
  }
  throw std::logic_error("pullback_weight: unreachable");
}

GaffneyReport gaffney_energies(const SmoothForm& w, const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi, int points_per_axis) {
  if (!w.gradient) throw std::invalid_argument("gaffney_energies: form has no gradient");
  GaffneyReport rep;
  rep.grad_energy = integrate_box(
      [&w](const Eigen::VectorXd& x) { return w.gradient(x).squaredNorm(); }, lo, hi,
      points_per_axis);
  if (w.q < w.n_dim) {
    const SmoothForm dw = smooth_d(w);
    rep.d_energy = integrate_box(
        [&dw](const Eigen::VectorXd& x) { return dw.components(x).squaredNorm(); }, lo, hi,
        points_per_axis);
  }
  if (w.q > 0) {
    const SmoothForm cw = smooth_codifferential(w);
    rep.delta_energy = integrate_box(
        [&cw](const Eigen::VectorXd& x) { return cw.components(x).squaredNorm(); }, lo, hi,
        points_per_axis);
  }
  rep.defect = rep.grad_energy - rep.d_energy - rep.delta_energy;
  return rep;
}

}  // namespace derham
