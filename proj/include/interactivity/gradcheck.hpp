#pragma once

#include <cmath>
#include <functional>

#include "interactivity/rollout.hpp"

namespace interactivity::gradcheck {

/// Flattens policy parameters (weights then biases, row-major) into one vector.
inline Vector flatten(const models::PolicyParams& theta) {
  long n = 0;
  for (const Matrix& w : theta.weights) n += w.size();
  for (const Vector& b : theta.biases) n += b.size();
  Vector flat(n);
  long at = 0;
  for (const Matrix& w : theta.weights)
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) flat(at++) = w(i, j);
  for (const Vector& b : theta.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) flat(at++) = b(i);
  return flat;
}

inline models::PolicyParams unflatten(const models::PolicyParams& like, const Vector& flat) {
  models::PolicyParams theta = like;
  long at = 0;
  for (Matrix& w : theta.weights)
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = flat(at++);
  for (Vector& b : theta.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = flat(at++);
  return theta;
}

/// Central finite differences of a scalar function of the flattened
/// parameters. Forward evaluations only; independent of the reverse pass.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                         const Vector& at, double h = 1e-5) {
  Vector grad(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Vector lo = at, hi = at;
    lo(i) -= h;
    hi(i) += h;
    grad(i) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return grad;
}

struct GradCheckReport {
  double relative_error = 0.0;
  bool ok = false;
};

/// Compares the reverse-mode meta-gradient of J(theta) against central
/// finite differences over all policy parameters.
inline GradCheckReport check_policy_gradient(const models::PolicyParams& theta,
                                             const Vector& b_start, int T, const Matrix& W_ref,
                                             double gamma, double eta, double tolerance = 1e-4,
                                             double h = 1e-5) {
  rollout::PolicyGradient analytic = rollout::policy_gradient(theta, b_start, T, W_ref, gamma, eta);
  models::PolicyParams grads_as_params = theta;
  grads_as_params.weights = analytic.weights;
  grads_as_params.biases = analytic.biases;
  const Vector g = flatten(grads_as_params);

  auto objective = [&](const Vector& flat) {
    const models::PolicyParams perturbed = unflatten(theta, flat);
    rollout::ObjectiveGraph obj =
        rollout::policy_objective(perturbed, b_start, T, W_ref, gamma, eta);
    return obj.graph.scalar(obj.root);
  };
  const Vector fd = finite_difference_gradient(objective, flatten(theta), h);

  GradCheckReport report;
  // Floor the denominator so configurations with an identically zero
  // objective (both gradients at roundoff level) compare absolutely.
  const double denom = std::max({g.norm(), fd.norm(), 1e-6});
  report.relative_error = (g - fd).norm() / denom;
  report.ok = report.relative_error <= tolerance;
  return report;
}

}  // namespace interactivity::gradcheck
