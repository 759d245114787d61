#pragma once

#include <string>
#include <vector>

#include "interactivity/types.hpp"

namespace interactivity::models {

enum class Activation { Linear, Relu };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct PolicySpec {
  int dim = 64;    // input and output dimension d
  int width = 64;  // hidden width h (unused when depth == 1)
  int depth = 2;   // number of affine layers
  Activation activation = Activation::Linear;
  bool bias = true;
};

struct PolicyParams {
  PolicySpec spec;
  std::vector<Matrix> weights;  // weights[i]: layer i, out x in
  std::vector<Vector> biases;   // empty when spec.bias is false
};

struct OptimizerConfig {
  enum class Kind { Sgd, RmsProp, Adam };
  Kind kind = Kind::RmsProp;
  double step_size = 1e-3;
  double decay = 0.99;  // second-moment decay (RMSProp, Adam beta2)
  double epsilon = 1e-8;
  double beta1 = 0.9;  // Adam only
};

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s);
std::string to_string(OptimizerConfig::Kind k);

/// Per-parameter optimizer accumulators, one slot per parameter tensor.
struct OptimizerState {
  std::vector<Matrix> second_moment;
  std::vector<Matrix> first_moment;  // Adam only
  long step = 0;

  static OptimizerState zeros_like(const std::vector<const Matrix*>& params);
};

/// One optimizer step along `direction` (ascent direction as given; pass the
/// negated gradient to descend). Mutates params in place and the state.
void apply_update(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& direction,
                  OptimizerState& state, const OptimizerConfig& opt);

struct ValueParams {
  Matrix W;  // d x d
  OptimizerState opt;
};

// --- value function -------------------------------------------------------

Vector value_predict(const Matrix& W, const Vector& b);

/// Vector-valued TD error: b_next + gamma * W b_next - W b_prev.
Vector td_error(const Matrix& W, const Vector& b_prev, const Vector& b_next, double gamma);

/// Semi-gradient TD(0) step with plain step size: W + eta * delta b_prev^T.
Matrix value_update_inner(const Matrix& W, const Vector& b_prev, const Vector& b_next,
                          double gamma, double eta);

/// Semi-gradient TD(0) step through the configured optimizer.
/// Throws std::runtime_error if the update is non-finite.
void value_update_committed(ValueParams& value, const Vector& b_prev, const Vector& b_next,
                            double gamma, const OptimizerConfig& opt);

// --- policy ---------------------------------------------------------------

Vector rmsnorm(const Vector& x, double epsilon);

inline constexpr double kRmsNormEpsilon = 1e-8;

Vector policy_forward(const PolicyParams& theta, const Vector& b);

PolicyParams init_policy(const PolicySpec& spec, std::uint64_t seed);
ValueParams init_value(int d, std::uint64_t seed);

/// Layer shapes implied by a spec: depth affine layers, d -> h -> ... -> h -> d.
std::vector<std::pair<int, int>> layer_shapes(const PolicySpec& spec);

}  // namespace interactivity::models
