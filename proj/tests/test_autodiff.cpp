#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "interactivity/autodiff.hpp"

using namespace interactivity;
using autodiff::Graph;
using autodiff::NodeId;

namespace {

// Central finite differences of a scalar-valued graph builder with respect to
// one input matrix. The builder must place the perturbed matrix first.
Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& at,
                   double h = 1e-6) {
  Matrix grad(at.rows(), at.cols());
  for (Eigen::Index i = 0; i < at.rows(); ++i) {
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      Matrix lo = at, hi = at;
      lo(i, j) -= h;
      hi(i, j) += h;
      grad(i, j) = (f(hi) - f(lo)) / (2.0 * h);
    }
  }
  return grad;
}

double rel_err(const Matrix& a, const Matrix& b) {
  const double denom = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / denom;
}

}  // namespace

TEST_CASE("matvec squared norm gradient matches finite differences") {
  Rng rng(42);
  const Matrix A = gaussian_matrix(4, 4, 1.0, rng);
  const Matrix x = gaussian_matrix(4, 1, 1.0, rng);

  Graph g;
  const NodeId a_id = g.parameter(A);
  const NodeId x_id = g.parameter(x);
  const NodeId root = g.squared_norm(g.matvec(a_id, x_id));
  const auto grads = g.backward(root);

  auto fa = [&](const Matrix& m) {
    Graph h;
    return h.scalar(h.squared_norm(h.matvec(h.parameter(m), h.constant(x))));
  };
  auto fx = [&](const Matrix& m) {
    Graph h;
    return h.scalar(h.squared_norm(h.matvec(h.constant(A), h.parameter(m))));
  };
  CHECK(rel_err(grads[static_cast<size_t>(a_id)], fd_gradient(fa, A)) < 1e-5);
  CHECK(rel_err(grads[static_cast<size_t>(x_id)], fd_gradient(fx, x)) < 1e-5);
}

TEST_CASE("add, sub, scale gradients match finite differences") {
  Rng rng(7);
  const Matrix x = gaussian_matrix(3, 1, 1.0, rng);
  const Matrix y = gaussian_matrix(3, 1, 1.0, rng);

  Graph g;
  const NodeId xi = g.parameter(x);
  const NodeId yi = g.parameter(y);
  const NodeId root = g.squared_norm(g.sub(g.scale(g.add(xi, yi), 2.5), yi));
  const auto grads = g.backward(root);

  auto fx = [&](const Matrix& m) {
    Graph h;
    const NodeId a = h.parameter(m);
    const NodeId b = h.constant(y);
    return h.scalar(h.squared_norm(h.sub(h.scale(h.add(a, b), 2.5), b)));
  };
  auto fy = [&](const Matrix& m) {
    Graph h;
    const NodeId a = h.constant(x);
    const NodeId b = h.parameter(m);
    return h.scalar(h.squared_norm(h.sub(h.scale(h.add(a, b), 2.5), b)));
  };
  CHECK(rel_err(grads[static_cast<size_t>(xi)], fd_gradient(fx, x)) < 1e-5);
  CHECK(rel_err(grads[static_cast<size_t>(yi)], fd_gradient(fy, y)) < 1e-5);
}

TEST_CASE("relu gradient matches finite differences away from kinks") {
  Rng rng(11);
  Matrix x = gaussian_matrix(8, 1, 1.0, rng);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) < 1e-3) x(i) = 0.5;  // keep clear of the kink
  }
  Graph g;
  const NodeId xi = g.parameter(x);
  const auto grads = g.backward(g.squared_norm(g.relu(xi)));
  auto f = [](const Matrix& m) {
    Graph h;
    return h.scalar(h.squared_norm(h.relu(h.parameter(m))));
  };
  CHECK(rel_err(grads[static_cast<size_t>(xi)], fd_gradient(f, x)) < 1e-5);
}

TEST_CASE("relu subgradient at exactly zero is zero") {
  Matrix x = Matrix::Zero(3, 1);
  x(1) = 2.0;
  Graph g;
  const NodeId xi = g.parameter(x);
  const auto grads = g.backward(g.squared_norm(g.relu(xi)));
  const Matrix& gx = grads[static_cast<size_t>(xi)];
  CHECK(gx(0) == 0.0);
  CHECK(gx(2) == 0.0);
  CHECK(gx(1) == doctest::Approx(4.0));
}

TEST_CASE("rmsnorm output has unit root mean square and correct gradient") {
  Rng rng(3);
  const Matrix x = gaussian_matrix(6, 1, 2.0, rng);
  const double eps = 1e-8;
  Graph g;
  const NodeId xi = g.parameter(x);
  const NodeId y = g.rmsnorm(xi, eps);
  const double rms = std::sqrt(g.value(y).squaredNorm() / 6.0);
  CHECK(rms == doctest::Approx(1.0).epsilon(1e-6));

  // Weighted sum so the gradient exercises the full quotient rule.
  const Matrix w = gaussian_matrix(6, 1, 1.0, rng);
  const auto grads = g.backward(g.squared_norm(g.add(y, g.constant(w))));
  auto f = [&](const Matrix& m) {
    Graph h;
    return h.scalar(h.squared_norm(h.add(h.rmsnorm(h.parameter(m), eps), h.constant(w))));
  };
  CHECK(rel_err(grads[static_cast<size_t>(xi)], fd_gradient(f, x)) < 1e-5);
}

TEST_CASE("stopgrad blocks the gradient entirely") {
  Rng rng(5);
  const Matrix x = gaussian_matrix(4, 1, 1.0, rng);
  Graph g;
  const NodeId xi = g.parameter(x);
  const auto grads = g.backward(g.squared_norm(g.sub(g.stopgrad(xi), xi)));
  // ||stopgrad(x) - x||^2 is 0 at the recording point and its gradient with
  // respect to x flows only through the non-detached branch: -2(x_d - x) = 0.
  CHECK(grads[static_cast<size_t>(xi)].norm() == 0.0);
}

TEST_CASE("outer product gradient matches finite differences") {
  Rng rng(13);
  const Matrix u = gaussian_matrix(3, 1, 1.0, rng);
  const Matrix v = gaussian_matrix(5, 1, 1.0, rng);
  const Matrix c = gaussian_matrix(3, 5, 1.0, rng);
  Graph g;
  const NodeId ui = g.parameter(u);
  const NodeId vi = g.parameter(v);
  const auto grads = g.backward(g.squared_norm(g.add(g.outer(ui, vi), g.constant(c))));
  auto fu = [&](const Matrix& m) {
    Graph h;
    return h.scalar(
        h.squared_norm(h.add(h.outer(h.parameter(m), h.constant(v)), h.constant(c))));
  };
  auto fv = [&](const Matrix& m) {
    Graph h;
    return h.scalar(
        h.squared_norm(h.add(h.outer(h.constant(u), h.parameter(m)), h.constant(c))));
  };
  CHECK(rel_err(grads[static_cast<size_t>(ui)], fd_gradient(fu, u)) < 1e-5);
  CHECK(rel_err(grads[static_cast<size_t>(vi)], fd_gradient(fv, v)) < 1e-5);
}

TEST_CASE("td error with detached bootstrap yields the semi-gradient") {
  // 2x2 hand case: delta = b_next + gamma * stopgrad(W b_next) - W b_prev.
  // d||delta||^2 / dW = -2 delta b_prev^T, the TD(0) semi-gradient direction.
  Matrix W(2, 2);
  W << 0.3, -0.1, 0.2, 0.5;
  Vector b_prev(2), b_next(2);
  b_prev << 1.0, -2.0;
  b_next << 0.5, 1.5;
  const double gamma = 0.9;

  Graph g;
  const NodeId wi = g.parameter(W);
  const NodeId bp = g.constant(b_prev);
  const NodeId bn = g.constant(b_next);
  const NodeId boot = g.stopgrad(g.scale(g.matvec(wi, bn), gamma));
  const NodeId delta = g.sub(g.add(bn, boot), g.matvec(wi, bp));
  const auto grads = g.backward(g.squared_norm(delta));

  const Vector delta_val = b_next + gamma * W * b_next - W * b_prev;
  const Matrix expected = -2.0 * delta_val * b_prev.transpose();
  CHECK(rel_err(grads[static_cast<size_t>(wi)], expected) < 1e-12);
}

TEST_CASE("backward requires a scalar root") {
  Graph g;
  const NodeId x = g.parameter(Matrix::Ones(2, 1));
  CHECK_THROWS_AS((void)g.backward(x), std::invalid_argument);
}

TEST_CASE("shape mismatches are rejected at recording time") {
  Graph g;
  const NodeId a = g.parameter(Matrix::Ones(2, 3));
  const NodeId x = g.parameter(Matrix::Ones(2, 1));
  CHECK_THROWS_AS((void)g.matvec(a, x), std::invalid_argument);
  CHECK_THROWS_AS((void)g.add(a, x), std::invalid_argument);
}

TEST_CASE("recording does not mutate node values and replays bit-identically") {
  Rng rng(99);
  const Matrix A = gaussian_matrix(5, 5, 1.0, rng);
  const Matrix x = gaussian_matrix(5, 1, 1.0, rng);

  auto build = [&](Graph& g) {
    const NodeId ai = g.parameter(A);
    const NodeId xi = g.parameter(x);
    return g.backward(g.squared_norm(g.rmsnorm(g.matvec(ai, xi), 1e-8)));
  };
  Graph g1, g2;
  const auto grads1 = build(g1);
  const auto grads2 = build(g2);
  REQUIRE(grads1.size() == grads2.size());
  for (size_t i = 0; i < grads1.size(); ++i) CHECK((grads1[i] - grads2[i]).norm() == 0.0);
  CHECK((g1.value(0) - A).norm() == 0.0);  // parameter value untouched by backward
  CHECK((g1.value(1) - x).norm() == 0.0);
}
