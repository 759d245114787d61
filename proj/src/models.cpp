#include "interactivity/models.hpp"

#include <cmath>
#include <stdexcept>

namespace interactivity::models {

Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::Linear;
  if (s == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) { return a == Activation::Linear ? "linear" : "relu"; }

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerConfig::Kind::Sgd;
  if (s == "rmsprop") return OptimizerConfig::Kind::RmsProp;
  if (s == "adam") return OptimizerConfig::Kind::Adam;
  throw std::invalid_argument("unknown optimizer kind: " + s);
}

std::string to_string(OptimizerConfig::Kind k) {
  switch (k) {
    case OptimizerConfig::Kind::Sgd: return "sgd";
    case OptimizerConfig::Kind::RmsProp: return "rmsprop";
    case OptimizerConfig::Kind::Adam: return "adam";
  }
  return "?";
}

OptimizerState OptimizerState::zeros_like(const std::vector<const Matrix*>& params) {
  OptimizerState state;
  for (const Matrix* p : params) {
    state.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    state.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
  return state;
}

void apply_update(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& direction,
                  OptimizerState& state, const OptimizerConfig& opt) {
  if (params.size() != direction.size() || params.size() != state.second_moment.size())
    throw std::invalid_argument("apply_update: parameter/direction/state count mismatch");
  state.step += 1;
  for (size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *direction[i];
    switch (opt.kind) {
      case OptimizerConfig::Kind::Sgd:
        p += opt.step_size * g;
        break;
      case OptimizerConfig::Kind::RmsProp: {
        Matrix& acc = state.second_moment[i];
        acc = opt.decay * acc + (1.0 - opt.decay) * g.cwiseProduct(g);
        p += opt.step_size *
             g.cwiseQuotient((acc.array() + opt.epsilon).sqrt().matrix());
        break;
      }
      case OptimizerConfig::Kind::Adam: {
        Matrix& m1 = state.first_moment[i];
        Matrix& m2 = state.second_moment[i];
        m1 = opt.beta1 * m1 + (1.0 - opt.beta1) * g;
        m2 = opt.decay * m2 + (1.0 - opt.decay) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
        const double c2 = 1.0 - std::pow(opt.decay, static_cast<double>(state.step));
        p += opt.step_size * (m1 / c1).cwiseQuotient(
                                 ((m2 / c2).array().sqrt() + opt.epsilon).matrix());
        break;
      }
    }
  }
}

Vector value_predict(const Matrix& W, const Vector& b) {
  if (W.cols() != b.size()) throw std::invalid_argument("value_predict: dimension mismatch");
  return W * b;
}

Vector td_error(const Matrix& W, const Vector& b_prev, const Vector& b_next, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("td_error: gamma outside [0,1]");
  return b_next + gamma * value_predict(W, b_next) - value_predict(W, b_prev);
}

Matrix value_update_inner(const Matrix& W, const Vector& b_prev, const Vector& b_next,
                          double gamma, double eta) {
  return W + eta * td_error(W, b_prev, b_next, gamma) * b_prev.transpose();
}

void value_update_committed(ValueParams& value, const Vector& b_prev, const Vector& b_next,
                            double gamma, const OptimizerConfig& opt) {
  const Matrix grad = td_error(value.W, b_prev, b_next, gamma) * b_prev.transpose();
  apply_update({&value.W}, {&grad}, value.opt, opt);
  if (!value.W.allFinite())
    throw std::runtime_error("value_update_committed: non-finite parameters after update");
}

Vector rmsnorm(const Vector& x, double epsilon) {
  const double s = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()) + epsilon);
  return x / s;
}

std::vector<std::pair<int, int>> layer_shapes(const PolicySpec& spec) {
  std::vector<std::pair<int, int>> shapes;
  for (int i = 0; i < spec.depth; ++i) {
    const int in = (i == 0) ? spec.dim : spec.width;
    const int out = (i == spec.depth - 1) ? spec.dim : spec.width;
    shapes.emplace_back(out, in);
  }
  return shapes;
}

Vector policy_forward(const PolicyParams& theta, const Vector& b) {
  if (theta.weights.empty() || theta.weights.front().cols() != b.size())
    throw std::invalid_argument("policy_forward: dimension mismatch");
  Vector h = b;
  for (size_t i = 0; i < theta.weights.size(); ++i) {
    h = theta.weights[i] * h;
    if (!theta.biases.empty()) h += theta.biases[i];
    if (i + 1 < theta.weights.size() && theta.spec.activation == Activation::Relu)
      h = h.cwiseMax(0.0);
  }
  return rmsnorm(h, kRmsNormEpsilon);
}

PolicyParams init_policy(const PolicySpec& spec, std::uint64_t seed) {
  if (spec.dim <= 0 || spec.depth <= 0 || (spec.depth > 1 && spec.width <= 0))
    throw std::invalid_argument("init_policy: invalid spec");
  Rng rng(seed);
  PolicyParams theta;
  theta.spec = spec;
  for (auto [out, in] : layer_shapes(spec)) {
    theta.weights.push_back(gaussian_matrix(out, in, 1.0 / std::sqrt(static_cast<double>(in)), rng));
    if (spec.bias) theta.biases.push_back(Vector::Zero(out));
  }
  return theta;
}

ValueParams init_value(int d, std::uint64_t seed) {
  if (d <= 0) throw std::invalid_argument("init_value: d must be positive");
  Rng rng(seed);
  ValueParams value;
  value.W = gaussian_matrix(d, d, 1.0 / static_cast<double>(d), rng);
  value.opt = OptimizerState::zeros_like({&value.W});
  return value;
}

}  // namespace interactivity::models
