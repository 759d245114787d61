#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "interactivity/models.hpp"

using namespace interactivity;
using namespace interactivity::models;

TEST_CASE("td error reduces to difference when gamma is zero and W is identity") {
  Vector b_prev(3), b_next(3);
  b_prev << 1.0, 2.0, 3.0;
  b_next << 0.5, -1.0, 2.0;
  const Matrix W = Matrix::Identity(3, 3);
  const Vector delta = td_error(W, b_prev, b_next, 0.0);
  CHECK((delta - (b_next - b_prev)).norm() == 0.0);
}

TEST_CASE("repeated inner updates contract the td error geometrically at gamma 0") {
  // For gamma = 0 and a fixed transition, delta' = (1 - eta ||b_prev||^2) delta.
  Rng rng(21);
  const Vector b_prev = gaussian_vector(4, 1.0, rng);
  const Vector b_next = gaussian_vector(4, 1.0, rng);
  Matrix W = gaussian_matrix(4, 4, 0.5, rng);
  const double eta = 0.05;
  const double factor = std::abs(1.0 - eta * b_prev.squaredNorm());
  for (int i = 0; i < 5; ++i) {
    const double before = td_error(W, b_prev, b_next, 0.0).norm();
    W = value_update_inner(W, b_prev, b_next, 0.0, eta);
    const double after = td_error(W, b_prev, b_next, 0.0).norm();
    CHECK(after == doctest::Approx(factor * before).epsilon(1e-10));
  }
}

TEST_CASE("one inner update lowers the squared td error when the step is stable") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector b_prev = gaussian_vector(5, 1.0, rng);
    const Vector b_next = gaussian_vector(5, 1.0, rng);
    const Matrix W = gaussian_matrix(5, 5, 0.5, rng);
    const double eta = 0.5 / b_prev.squaredNorm();  // eta ||b_prev||^2 = 0.5 < 1
    const double before = td_error(W, b_prev, b_next, 0.0).squaredNorm();
    const Matrix W2 = value_update_inner(W, b_prev, b_next, 0.0, eta);
    const double after = td_error(W2, b_prev, b_next, 0.0).squaredNorm();
    if (before > 1e-20) CHECK(after < before);
  }
}

TEST_CASE("sgd update is the plain ascent formula") {
  Matrix p = Matrix::Zero(2, 2);
  const Matrix g = Matrix::Ones(2, 2);
  OptimizerConfig opt;
  opt.kind = OptimizerConfig::Kind::Sgd;
  opt.step_size = 0.25;
  OptimizerState state = OptimizerState::zeros_like({&p});
  apply_update({&p}, {&g}, state, opt);
  CHECK((p - 0.25 * Matrix::Ones(2, 2)).norm() == 0.0);
}

TEST_CASE("rmsprop step magnitude is bounded by step_size / sqrt(1 - decay) roughly") {
  // First step: acc = (1-decay) g^2, so |dp| = step * |g| / sqrt((1-decay) g^2 + eps)
  // <= step / sqrt(1-decay).
  Rng rng(17);
  Matrix p = Matrix::Zero(3, 3);
  const Matrix g = gaussian_matrix(3, 3, 10.0, rng);
  OptimizerConfig opt;  // rmsprop defaults
  OptimizerState state = OptimizerState::zeros_like({&p});
  apply_update({&p}, {&g}, state, opt);
  const double bound = opt.step_size / std::sqrt(1.0 - opt.decay) + 1e-12;
  CHECK(p.cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("rmsprop matches a straight-line reimplementation over several steps") {
  Rng rng(29);
  Matrix p = gaussian_matrix(2, 3, 1.0, rng);
  Matrix p_ref = p;
  Matrix acc = Matrix::Zero(2, 3);
  OptimizerConfig opt;
  OptimizerState state = OptimizerState::zeros_like({&p});
  for (int i = 0; i < 10; ++i) {
    const Matrix g = gaussian_matrix(2, 3, 1.0, rng);
    apply_update({&p}, {&g}, state, opt);
    acc = opt.decay * acc + (1.0 - opt.decay) * g.cwiseProduct(g);
    for (Eigen::Index r = 0; r < 2; ++r)
      for (Eigen::Index c = 0; c < 3; ++c)
        p_ref(r, c) += opt.step_size * g(r, c) / std::sqrt(acc(r, c) + opt.epsilon);
    CHECK((p - p_ref).norm() < 1e-14);
  }
}

TEST_CASE("adam first step moves by step_size in the gradient sign direction") {
  Matrix p = Matrix::Zero(1, 2);
  Matrix g(1, 2);
  g << 3.0, -7.0;
  OptimizerConfig opt;
  opt.kind = OptimizerConfig::Kind::Adam;
  OptimizerState state = OptimizerState::zeros_like({&p});
  apply_update({&p}, {&g}, state, opt);
  // With bias correction the first step is step * g / (|g| + eps) = step * sign(g).
  CHECK(p(0, 0) == doctest::Approx(opt.step_size).epsilon(1e-6));
  CHECK(p(0, 1) == doctest::Approx(-opt.step_size).epsilon(1e-6));
}

TEST_CASE("rmsnorm output has unit root mean square") {
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const Vector x = gaussian_vector(16, 3.0, rng);
    const Vector y = rmsnorm(x, 1e-8);
    CHECK(std::sqrt(y.squaredNorm() / 16.0) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("layer shapes follow d -> h -> ... -> h -> d") {
  PolicySpec spec;
  spec.dim = 6;
  spec.width = 4;
  spec.depth = 3;
  const auto shapes = layer_shapes(spec);
  REQUIRE(shapes.size() == 3);
  CHECK(shapes[0] == std::pair<int, int>{4, 6});
  CHECK(shapes[1] == std::pair<int, int>{4, 4});
  CHECK(shapes[2] == std::pair<int, int>{6, 4});

  spec.depth = 1;
  const auto single = layer_shapes(spec);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == std::pair<int, int>{6, 6});
}

TEST_CASE("deep linear policy without biases collapses to a single matrix") {
  PolicySpec spec;
  spec.dim = 5;
  spec.width = 7;
  spec.depth = 3;
  spec.activation = Activation::Linear;
  spec.bias = false;
  PolicyParams theta = init_policy(spec, 123);
  Rng rng(9);
  const Vector b = gaussian_vector(5, 1.0, rng);
  const Matrix product = theta.weights[2] * theta.weights[1] * theta.weights[0];
  const Vector expected = rmsnorm(product * b, kRmsNormEpsilon);
  CHECK((policy_forward(theta, b) - expected).norm() < 1e-10);
}

TEST_CASE("relu policy applies the nonlinearity between layers only") {
  PolicySpec spec;
  spec.dim = 3;
  spec.width = 4;
  spec.depth = 2;
  spec.activation = Activation::Relu;
  spec.bias = true;
  PolicyParams theta = init_policy(spec, 7);
  Rng rng(2);
  const Vector b = gaussian_vector(3, 1.0, rng);
  Vector h = (theta.weights[0] * b + theta.biases[0]).cwiseMax(0.0);
  const Vector expected = rmsnorm(theta.weights[1] * h + theta.biases[1], kRmsNormEpsilon);
  CHECK((policy_forward(theta, b) - expected).norm() < 1e-12);
}

TEST_CASE("initialization is deterministic per seed and distinct across seeds") {
  PolicySpec spec;
  spec.dim = 4;
  spec.width = 4;
  spec.depth = 2;
  const PolicyParams a = init_policy(spec, 42);
  const PolicyParams b = init_policy(spec, 42);
  const PolicyParams c = init_policy(spec, 43);
  CHECK((a.weights[0] - b.weights[0]).norm() == 0.0);
  CHECK((a.weights[1] - b.weights[1]).norm() == 0.0);
  CHECK((a.weights[0] - c.weights[0]).norm() > 0.0);
  CHECK(a.biases[0].norm() == 0.0);  // zero-initialized biases

  const ValueParams v1 = init_value(2, 1);
  const ValueParams v2 = init_value(2, 1);
  const ValueParams v3 = init_value(2, 2);
  CHECK(v1.W.allFinite());
  CHECK((v1.W - v2.W).norm() == 0.0);
  CHECK((v1.W - v3.W).norm() > 0.0);
}

TEST_CASE("weight initialization variance tracks 1 / fan_in") {
  PolicySpec spec;
  spec.dim = 400;
  spec.depth = 1;
  const PolicyParams theta = init_policy(spec, 77);
  const Matrix& w = theta.weights[0];
  const double var = w.array().square().mean();
  // fan_in = 400, so the entry variance should be near 1/400 = 2.5e-3.
  CHECK(var == doctest::Approx(1.0 / 400.0).epsilon(0.05));
}

TEST_CASE("committed update aborts on a non-finite result") {
  ValueParams value = init_value(2, 3);
  Vector b_prev(2), b_next(2);
  b_prev << 1.0, 0.0;
  b_next << std::numeric_limits<double>::infinity(), 0.0;
  OptimizerConfig opt;
  CHECK_THROWS_AS(value_update_committed(value, b_prev, b_next, 0.9, opt), std::runtime_error);
}

TEST_CASE("string conversions round-trip") {
  CHECK(activation_from_string("linear") == Activation::Linear);
  CHECK(activation_from_string("relu") == Activation::Relu);
  CHECK(to_string(Activation::Relu) == "relu");
  CHECK_THROWS_AS(activation_from_string("tanh"), std::invalid_argument);
  CHECK(optimizer_kind_from_string("rmsprop") == OptimizerConfig::Kind::RmsProp);
  CHECK(to_string(OptimizerConfig::Kind::Adam) == "adam");
  CHECK_THROWS_AS(optimizer_kind_from_string("lbfgs"), std::invalid_argument);
}
