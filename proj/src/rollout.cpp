#include "interactivity/rollout.hpp"

#include <sstream>

namespace interactivity::rollout {

using autodiff::Graph;
using autodiff::NodeId;
using models::Activation;
using models::PolicyParams;

RolloutTrace rollout(const PolicyParams& theta, const Vector& b_start, int T, const Matrix& W_ref,
                     double gamma, double eta) {
  if (T < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
  RolloutTrace trace;
  trace.horizon = T;
  trace.gamma = gamma;
  trace.eta = eta;
  trace.behaviours.push_back(b_start);
  for (int k = 0; k < T; ++k) {
    Vector next = models::policy_forward(theta, trace.behaviours.back());
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "rollout: non-finite behaviour at step " << k;
      throw DivergenceError(msg.str(), k);
    }
    trace.behaviours.push_back(std::move(next));
  }
  trace.value_snapshots.push_back(W_ref);
  for (int k = 0; k < T; ++k) {
    const Vector& b_prev = trace.behaviours[static_cast<size_t>(k)];
    const Vector& b_next = trace.behaviours[static_cast<size_t>(k) + 1];
    trace.static_deltas.push_back(models::td_error(W_ref, b_prev, b_next, gamma));
    const Matrix& W_k = trace.value_snapshots.back();
    trace.dynamic_deltas.push_back(models::td_error(W_k, b_prev, b_next, gamma));
    trace.value_snapshots.push_back(models::value_update_inner(W_k, b_prev, b_next, gamma, eta));
  }
  return trace;
}

double static_complexity(const RolloutTrace& trace) {
  double sum = 0.0;
  for (const Vector& d : trace.static_deltas) sum += d.squaredNorm();
  return sum;
}

double dynamic_complexity(const RolloutTrace& trace) {
  double sum = 0.0;
  for (const Vector& d : trace.dynamic_deltas) sum += d.squaredNorm();
  return sum;
}

InteractivityEstimate interactivity_estimate(const RolloutTrace& trace) {
  InteractivityEstimate est;
  est.static_complexity = static_complexity(trace);
  est.dynamic_complexity = dynamic_complexity(trace);
  est.interactivity = est.static_complexity - est.dynamic_complexity;
  return est;
}

namespace {

NodeId record_policy_forward(Graph& g, const PolicyParams& theta,
                             const std::vector<NodeId>& weight_nodes,
                             const std::vector<NodeId>& bias_nodes, NodeId b) {
  NodeId h = b;
  for (size_t i = 0; i < theta.weights.size(); ++i) {
    h = g.matvec(weight_nodes[i], h);
    if (!bias_nodes.empty()) h = g.add(h, bias_nodes[i]);
    if (i + 1 < theta.weights.size() && theta.spec.activation == Activation::Relu) h = g.relu(h);
  }
  return g.rmsnorm(h, models::kRmsNormEpsilon);
}

// delta = b_next + gamma * W b_next - W b_prev, with the bootstrapped term
// optionally detached.
NodeId record_td_error(Graph& g, NodeId W, NodeId b_prev, NodeId b_next, double gamma,
                       bool detach_bootstrap) {
  NodeId boot = g.scale(g.matvec(W, b_next), gamma);
  if (detach_bootstrap) boot = g.stopgrad(boot);
  return g.sub(g.add(b_next, boot), g.matvec(W, b_prev));
}

}  // namespace

ObjectiveGraph policy_objective(const PolicyParams& theta, const Vector& b_start, int T,
                                const Matrix& W_ref, double gamma, double eta,
                                bool detach_bootstrap) {
  if (T < 1) throw std::invalid_argument("policy_objective: horizon must be >= 1");
  ObjectiveGraph obj;
  Graph& g = obj.graph;
  for (const Matrix& W : theta.weights) obj.weight_nodes.push_back(g.parameter(W));
  for (const Vector& b : theta.biases) obj.bias_nodes.push_back(g.parameter(b));
  const NodeId w_ref = g.constant(W_ref);

  std::vector<NodeId> behaviours{g.constant(b_start)};
  for (int k = 0; k < T; ++k) {
    NodeId next = record_policy_forward(g, theta, obj.weight_nodes, obj.bias_nodes,
                                        behaviours.back());
    if (!g.value(next).allFinite()) {
      std::ostringstream msg;
      msg << "policy_objective: non-finite behaviour at step " << k;
      throw DivergenceError(msg.str(), k);
    }
    behaviours.push_back(next);
  }

  NodeId objective = -1;
  NodeId W_dyn = w_ref;
  for (int k = 0; k < T; ++k) {
    const NodeId b_prev = behaviours[static_cast<size_t>(k)];
    const NodeId b_next = behaviours[static_cast<size_t>(k) + 1];
    const NodeId d_static = record_td_error(g, w_ref, b_prev, b_next, gamma, false);
    const NodeId d_dynamic = record_td_error(g, W_dyn, b_prev, b_next, gamma, detach_bootstrap);
    W_dyn = g.add(W_dyn, g.scale(g.outer(d_dynamic, b_prev), eta));
    const NodeId term = g.sub(g.squared_norm(d_static), g.squared_norm(d_dynamic));
    objective = (objective < 0) ? term : g.add(objective, term);
  }
  obj.root = objective;
  return obj;
}

PolicyGradient policy_gradient(const PolicyParams& theta, const Vector& b_start, int T,
                               const Matrix& W_ref, double gamma, double eta,
                               bool detach_bootstrap) {
  ObjectiveGraph obj = policy_objective(theta, b_start, T, W_ref, gamma, eta, detach_bootstrap);
  std::vector<Matrix> grads = obj.graph.backward(obj.root);
  PolicyGradient result;
  result.objective = obj.graph.scalar(obj.root);
  for (NodeId id : obj.weight_nodes) result.weights.push_back(grads[static_cast<size_t>(id)]);
  for (NodeId id : obj.bias_nodes) result.biases.push_back(grads[static_cast<size_t>(id)].col(0));
  return result;
}

void policy_step(PolicyParams& theta, const PolicyGradient& grad, models::OptimizerState& state,
                 const models::OptimizerConfig& opt) {
  std::vector<Matrix*> params;
  std::vector<Matrix> bias_mats;
  std::vector<const Matrix*> direction;
  for (const Matrix& gw : grad.weights)
    if (!gw.allFinite()) throw DivergenceError("policy_step: non-finite gradient");
  for (const Vector& gb : grad.biases)
    if (!gb.allFinite()) throw DivergenceError("policy_step: non-finite gradient");

  for (size_t i = 0; i < theta.weights.size(); ++i) {
    params.push_back(&theta.weights[i]);
    direction.push_back(&grad.weights[i]);
  }
  bias_mats.reserve(grad.biases.size());
  std::vector<Matrix> bias_params;
  bias_params.reserve(theta.biases.size());
  for (size_t i = 0; i < theta.biases.size(); ++i) {
    bias_params.push_back(theta.biases[i]);
    bias_mats.push_back(grad.biases[i]);
  }
  for (size_t i = 0; i < bias_params.size(); ++i) {
    params.push_back(&bias_params[i]);
    direction.push_back(&bias_mats[i]);
  }
  models::apply_update(params, direction, state, opt);
  for (size_t i = 0; i < theta.biases.size(); ++i) theta.biases[i] = bias_params[i].col(0);
}

models::OptimizerState make_policy_optimizer_state(const PolicyParams& theta) {
  std::vector<const Matrix*> params;
  std::vector<Matrix> bias_mats;
  for (const Matrix& w : theta.weights) params.push_back(&w);
  bias_mats.reserve(theta.biases.size());
  for (const Vector& b : theta.biases) bias_mats.push_back(b);
  for (const Matrix& b : bias_mats) params.push_back(&b);
  return models::OptimizerState::zeros_like(params);
}

}  // namespace interactivity::rollout
