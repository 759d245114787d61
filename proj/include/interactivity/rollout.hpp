#pragma once

#include <vector>

#include "interactivity/autodiff.hpp"
#include "interactivity/models.hpp"

namespace interactivity::rollout {

/// Thrown when a rollout or a recorded objective produces non-finite values.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what, long step_index_ = -1)
      : std::runtime_error(what), step_index(step_index_) {}
  long step_index;
};

/// An imagined T-step trajectory with both TD-error branches.
/// behaviours[k+1] = policy_forward(theta, behaviours[k]);
/// static_deltas[k] is computed under the frozen W_ref,
/// dynamic_deltas[k] under the inner-updated chain value_snapshots[k].
struct RolloutTrace {
  std::vector<Vector> behaviours;       // T + 1
  std::vector<Vector> static_deltas;    // T
  std::vector<Vector> dynamic_deltas;   // T
  std::vector<Matrix> value_snapshots;  // T + 1, snapshots[0] == W_ref
  int horizon = 0;
  double gamma = 0.0;
  double eta = 0.0;
};

struct InteractivityEstimate {
  double static_complexity = 0.0;
  double dynamic_complexity = 0.0;
  double interactivity = 0.0;  // static - dynamic, exactly
};

RolloutTrace rollout(const models::PolicyParams& theta, const Vector& b_start, int T,
                     const Matrix& W_ref, double gamma, double eta);

double static_complexity(const RolloutTrace& trace);
double dynamic_complexity(const RolloutTrace& trace);
InteractivityEstimate interactivity_estimate(const RolloutTrace& trace);

/// The rollout recorded on an autodiff graph, with root J(theta) =
/// sum_k ||delta_static_k||^2 - ||delta_dynamic_k||^2. W_ref enters as a
/// constant (frozen copy); the dynamic branch is fully differentiated unless
/// detach_bootstrap is set, which wraps the bootstrapped term of every
/// dynamic TD error in a stopgrad.
struct ObjectiveGraph {
  autodiff::Graph graph;
  autodiff::NodeId root = -1;
  std::vector<autodiff::NodeId> weight_nodes;
  std::vector<autodiff::NodeId> bias_nodes;
};

ObjectiveGraph policy_objective(const models::PolicyParams& theta, const Vector& b_start, int T,
                                const Matrix& W_ref, double gamma, double eta,
                                bool detach_bootstrap = false);

struct PolicyGradient {
  double objective = 0.0;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Evaluates J and its gradient with respect to the policy parameters.
PolicyGradient policy_gradient(const models::PolicyParams& theta, const Vector& b_start, int T,
                               const Matrix& W_ref, double gamma, double eta,
                               bool detach_bootstrap = false);

/// One ascent step on J. Throws DivergenceError on a non-finite gradient.
void policy_step(models::PolicyParams& theta, const PolicyGradient& grad,
                 models::OptimizerState& state, const models::OptimizerConfig& opt);

models::OptimizerState make_policy_optimizer_state(const models::PolicyParams& theta);

}  // namespace interactivity::rollout
