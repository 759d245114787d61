#include "interactivity/loop.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace interactivity::loop {

models::PolicySpec ExperimentConfig::policy_spec() const {
  models::PolicySpec spec;
  spec.dim = d;
  spec.width = width;
  spec.depth = depth;
  spec.activation = activation;
  spec.bias = bias;
  return spec;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto require = [&errors](bool ok, const char* msg) {
    if (!ok) errors.emplace_back(msg);
  };
  require(d > 0, "d must be positive");
  require(T >= 1, "T must be >= 1");
  require(steps >= 0, "steps must be non-negative");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0,1]");
  require(eta_inner >= 0.0, "eta_inner must be non-negative");
  require(depth >= 1, "depth must be >= 1");
  require(depth == 1 || width >= 1, "width must be >= 1 for depth > 1");
  require(policy_opt.step_size > 0.0, "policy optimizer step_size must be positive");
  require(value_opt.step_size > 0.0, "value optimizer step_size must be positive");
  require(policy_opt.decay > 0.0 && policy_opt.decay < 1.0, "policy optimizer decay must be in (0,1)");
  require(value_opt.decay > 0.0 && value_opt.decay < 1.0, "value optimizer decay must be in (0,1)");
  require(policy_opt.epsilon > 0.0, "policy optimizer epsilon must be positive");
  require(value_opt.epsilon > 0.0, "value optimizer epsilon must be positive");
  require(freeze_policy_at <= steps, "freeze_policy_at must be <= steps");
  require(freeze_value_at <= steps, "freeze_value_at must be <= steps");
  require(log_every >= 1, "log_every must be >= 1");
  require(smoothing_half_life > 0.0, "smoothing_half_life must be positive");
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const std::string& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
  }
}

RunState init_run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunState state;
  // Distinct derived seeds per component so resizing one does not shift the
  // draws of another.
  state.policy = models::init_policy(cfg.policy_spec(), cfg.seed * 3 + 1);
  state.value = models::init_value(cfg.d, cfg.seed * 3 + 2);
  state.policy_opt_state = rollout::make_policy_optimizer_state(state.policy);
  Rng rng(cfg.seed * 3);
  state.b = gaussian_vector(cfg.d, 1.0 / std::sqrt(static_cast<double>(cfg.d)), rng);
  return state;
}

namespace {

bool value_frozen(const ExperimentConfig& cfg, long step) {
  return cfg.freeze_value_at >= 0 && step >= cfg.freeze_value_at;
}

bool policy_frozen(const ExperimentConfig& cfg, long step) {
  return cfg.freeze_policy_at >= 0 && step >= cfg.freeze_policy_at;
}

}  // namespace

MetricsRecord run_step(RunState& state, const ExperimentConfig& cfg) {
  if (!state.b.allFinite())
    throw rollout::DivergenceError("run_step: non-finite behaviour state", state.step);
  const auto t0 = std::chrono::steady_clock::now();
  // Freezing the value function disables all value learning, including the
  // inner chain of the rollout; interactivity is then identically zero.
  const double eta = value_frozen(cfg, state.step) ? 0.0 : cfg.eta_inner;

  // (1)-(3) imagined rollout with both branches, recorded for the meta-gradient.
  rollout::PolicyGradient grad = rollout::policy_gradient(
      state.policy, state.b, cfg.T, state.value.W, cfg.gamma, eta, cfg.detach_bootstrap);
  rollout::RolloutTrace trace =
      rollout::rollout(state.policy, state.b, cfg.T, state.value.W, cfg.gamma, eta);
  rollout::InteractivityEstimate est = rollout::interactivity_estimate(trace);

  // (4) one policy optimizer step ascending J.
  if (!policy_frozen(cfg, state.step)) {
    rollout::policy_step(state.policy, grad, state.policy_opt_state, cfg.policy_opt);
    state.policy_updates += 1;
  }

  // (5) take the real action with the updated policy.
  const Vector b_prev = state.b;
  state.b = models::policy_forward(state.policy, b_prev);
  if (!state.b.allFinite())
    throw rollout::DivergenceError("run_step: non-finite action", state.step);

  // (6) committed TD(0) value update on the real transition.
  const Vector committed_delta = models::td_error(state.value.W, b_prev, state.b, cfg.gamma);
  if (!value_frozen(cfg, state.step)) {
    models::value_update_committed(state.value, b_prev, state.b, cfg.gamma, cfg.value_opt);
    state.value_updates += 1;
  }

  const double alpha = 1.0 - std::exp2(-1.0 / cfg.smoothing_half_life);
  if (!state.smoothed_initialized) {
    state.smoothed_interactivity = est.interactivity;
    state.smoothed_initialized = true;
  } else {
    state.smoothed_interactivity += alpha * (est.interactivity - state.smoothed_interactivity);
  }

  MetricsRecord rec;
  rec.step = state.step;
  rec.interactivity = est.interactivity;
  rec.static_complexity = est.static_complexity;
  rec.dynamic_complexity = est.dynamic_complexity;
  rec.smoothed_interactivity = state.smoothed_interactivity;
  rec.committed_delta_norm = committed_delta.norm();
  for (int i = 0; i < 8; ++i) rec.b[i] = i < state.b.size() ? state.b(i) : 0.0;
  rec.behaviour_norm = state.b.norm();
  if (cfg.record_wall_time) {
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  state.step += 1;
  return rec;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult result;
  result.final_state = init_run(cfg);
  RunState& state = result.final_state;
  try {
    for (long step = 0; step < cfg.steps; ++step) {
      MetricsRecord rec = run_step(state, cfg);
      if (step % cfg.log_every == 0) result.metrics.push_back(rec);
      result.steps_completed = step + 1;
    }
  } catch (const rollout::DivergenceError& err) {
    result.status = RunStatus::Diverged;
    result.divergence_message = err.what();
  }
  return result;
}

RunResult run_control(ExperimentConfig cfg, FreezeMode mode, long freeze_step) {
  if (mode == FreezeMode::FreezePolicy || mode == FreezeMode::FreezeBoth)
    cfg.freeze_policy_at = freeze_step;
  if (mode == FreezeMode::FreezeValue || mode == FreezeMode::FreezeBoth)
    cfg.freeze_value_at = freeze_step;
  return run_experiment(cfg);
}

const char* const kMetricsCsvHeader =
    "step,interactivity,static,dynamic,smoothed,delta_norm,b0,b1,b2,b3,b4,b5,b6,b7,bnorm,wall_ms";

namespace {

void append_double(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += ',';
  line += buf;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRecord& r : records) {
    std::string line = std::to_string(r.step);
    append_double(line, r.interactivity);
    append_double(line, r.static_complexity);
    append_double(line, r.dynamic_complexity);
    append_double(line, r.smoothed_interactivity);
    append_double(line, r.committed_delta_norm);
    for (double v : r.b) append_double(line, v);
    append_double(line, r.behaviour_norm);
    append_double(line, r.wall_ms);
    out << line << '\n';
  }
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_metrics_csv(out, records);
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_checkpoint(const std::string& path, const RunState& state,
                      const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["version"] = 1;
  j["step"] = state.step;
  j["seed"] = cfg.seed;
  j["d"] = cfg.d;
  j["behaviour"] = std::vector<double>(state.b.data(), state.b.data() + state.b.size());
  j["value_W"] = matrix_to_json(state.value.W);
  nlohmann::json layers = nlohmann::json::array();
  for (size_t i = 0; i < state.policy.weights.size(); ++i) {
    nlohmann::json layer;
    layer["weight"] = matrix_to_json(state.policy.weights[i]);
    if (!state.policy.biases.empty()) {
      const Vector& b = state.policy.biases[i];
      layer["bias"] = std::vector<double>(b.data(), b.data() + b.size());
    }
    layers.push_back(std::move(layer));
  }
  j["policy"] = {{"depth", cfg.depth},
                 {"width", cfg.width},
                 {"activation", models::to_string(cfg.activation)},
                 {"layers", std::move(layers)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace interactivity::loop
