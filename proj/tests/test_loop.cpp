#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "interactivity/loop.hpp"

using namespace interactivity;
using loop::ExperimentConfig;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.d = 4;
  cfg.T = 2;
  cfg.steps = 20;
  cfg.log_every = 1;
  cfg.seed = 7;
  return cfg;
}

std::string csv_string(const std::vector<loop::MetricsRecord>& metrics) {
  std::ostringstream out;
  loop::write_metrics_csv(out, metrics);
  return out.str();
}

}  // namespace

TEST_CASE("config validation collects all field errors") {
  ExperimentConfig cfg;
  cfg.d = 0;
  cfg.T = 0;
  cfg.gamma = 1.5;
  cfg.log_every = 0;
  try {
    cfg.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("d must be positive") != std::string::npos);
    CHECK(msg.find("T must be >= 1") != std::string::npos);
    CHECK(msg.find("gamma") != std::string::npos);
    CHECK(msg.find("log_every") != std::string::npos);
  }
}

TEST_CASE("initial action has the N(0, 1/d) scale on average") {
  // E||b_0||^2 = d * (1/d) = 1; Monte Carlo over seeds.
  double sum = 0.0;
  const int n = 400;
  for (int s = 0; s < n; ++s) {
    ExperimentConfig cfg = small_config();
    cfg.d = 16;
    cfg.seed = static_cast<std::uint64_t>(s);
    const loop::RunState state = loop::init_run(cfg);
    sum += state.b.squaredNorm();
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("init is deterministic and seed-sensitive") {
  ExperimentConfig cfg = small_config();
  const auto a = loop::init_run(cfg);
  const auto b = loop::init_run(cfg);
  cfg.seed += 1;
  const auto c = loop::init_run(cfg);
  CHECK((a.b - b.b).norm() == 0.0);
  CHECK((a.value.W - b.value.W).norm() == 0.0);
  CHECK((a.policy.weights[0] - b.policy.weights[0]).norm() == 0.0);
  CHECK((a.b - c.b).norm() > 0.0);
  CHECK((a.value.W - c.value.W).norm() > 0.0);
}

TEST_CASE("each unfrozen step performs exactly one policy and one value update") {
  ExperimentConfig cfg = small_config();
  const auto result = loop::run_experiment(cfg);
  REQUIRE(result.status == loop::RunStatus::Completed);
  CHECK(result.final_state.policy_updates == cfg.steps);
  CHECK(result.final_state.value_updates == cfg.steps);
  CHECK(result.final_state.step == cfg.steps);
  CHECK(result.metrics.size() == static_cast<size_t>(cfg.steps));
}

TEST_CASE("steps=0 yields empty metrics and the initial state") {
  ExperimentConfig cfg = small_config();
  cfg.steps = 0;
  const auto result = loop::run_experiment(cfg);
  CHECK(result.metrics.empty());
  CHECK(result.steps_completed == 0);
  const auto fresh = loop::init_run(cfg);
  CHECK((result.final_state.value.W - fresh.value.W).norm() == 0.0);
}

TEST_CASE("freezing the policy stops policy updates but not value updates") {
  ExperimentConfig cfg = small_config();
  cfg.freeze_policy_at = 5;
  const auto result = loop::run_experiment(cfg);
  CHECK(result.final_state.policy_updates == 5);
  CHECK(result.final_state.value_updates == cfg.steps);

  const auto control = loop::run_control(small_config(), loop::FreezeMode::FreezePolicy, 5);
  CHECK(control.final_state.policy_updates == 5);
}

TEST_CASE("freezing the value function makes interactivity identically zero") {
  ExperimentConfig cfg = small_config();
  cfg.freeze_value_at = 0;
  const auto result = loop::run_experiment(cfg);
  REQUIRE(result.status == loop::RunStatus::Completed);
  CHECK(result.final_state.value_updates == 0);
  for (const auto& rec : result.metrics) {
    CHECK(std::abs(rec.interactivity) <= 1e-12);
    CHECK(std::abs(rec.smoothed_interactivity) <= 1e-12);
  }
  // The frozen value function never moves.
  const auto fresh = loop::init_run(cfg);
  CHECK((result.final_state.value.W - fresh.value.W).norm() == 0.0);
}

TEST_CASE("behaviour logging matches the state and has unit root mean square") {
  ExperimentConfig cfg = small_config();
  cfg.steps = 5;
  const auto result = loop::run_experiment(cfg);
  for (const auto& rec : result.metrics) {
    CHECK(rec.behaviour_norm ==
          doctest::Approx(std::sqrt(static_cast<double>(cfg.d))).epsilon(1e-6));
  }
  const auto& last = result.metrics.back();
  for (int i = 0; i < std::min(8, cfg.d); ++i)
    CHECK(last.b[i] == doctest::Approx(result.final_state.b(i)));
}

TEST_CASE("smoothing follows the half-life exponential moving average") {
  ExperimentConfig cfg = small_config();
  cfg.steps = 10;
  cfg.smoothing_half_life = 3.0;
  const auto result = loop::run_experiment(cfg);
  const double alpha = 1.0 - std::exp2(-1.0 / 3.0);
  double ema = result.metrics[0].interactivity;  // initialized to the first sample
  CHECK(result.metrics[0].smoothed_interactivity == doctest::Approx(ema));
  for (size_t i = 1; i < result.metrics.size(); ++i) {
    ema += alpha * (result.metrics[i].interactivity - ema);
    CHECK(result.metrics[i].smoothed_interactivity == doctest::Approx(ema).epsilon(1e-12));
  }
}

TEST_CASE("three-step run matches a straight-line reimplementation of the loop") {
  // Sgd optimizers keep the reference arithmetic transparent.
  ExperimentConfig cfg;
  cfg.d = 4;
  cfg.T = 2;
  cfg.steps = 3;
  cfg.log_every = 1;
  cfg.seed = 3;
  cfg.policy_opt.kind = models::OptimizerConfig::Kind::Sgd;
  cfg.value_opt.kind = models::OptimizerConfig::Kind::Sgd;

  const auto result = loop::run_experiment(cfg);
  REQUIRE(result.status == loop::RunStatus::Completed);

  // Reference: replay the documented per-step ordering by hand.
  loop::RunState state = loop::init_run(cfg);
  for (long t = 0; t < cfg.steps; ++t) {
    const auto grad = rollout::policy_gradient(state.policy, state.b, cfg.T, state.value.W,
                                               cfg.gamma, cfg.eta_inner);
    const auto trace =
        rollout::rollout(state.policy, state.b, cfg.T, state.value.W, cfg.gamma, cfg.eta_inner);
    const auto est = rollout::interactivity_estimate(trace);
    for (size_t l = 0; l < state.policy.weights.size(); ++l) {
      state.policy.weights[l] += cfg.policy_opt.step_size * grad.weights[l];
      state.policy.biases[l] += cfg.policy_opt.step_size * grad.biases[l];
    }
    const Vector b_prev = state.b;
    state.b = models::policy_forward(state.policy, b_prev);
    const Vector delta = models::td_error(state.value.W, b_prev, state.b, cfg.gamma);
    state.value.W += cfg.value_opt.step_size * delta * b_prev.transpose();

    const auto& rec = result.metrics[static_cast<size_t>(t)];
    CHECK(rec.interactivity == doctest::Approx(est.interactivity).epsilon(1e-12));
    CHECK(rec.committed_delta_norm == doctest::Approx(delta.norm()).epsilon(1e-12));
  }
  CHECK((result.final_state.b - state.b).norm() < 1e-12);
  CHECK((result.final_state.value.W - state.value.W).norm() < 1e-12);
  for (size_t l = 0; l < state.policy.weights.size(); ++l)
    CHECK((result.final_state.policy.weights[l] - state.policy.weights[l]).norm() < 1e-12);
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
  ExperimentConfig cfg = small_config();
  cfg.steps = 50;
  const auto r1 = loop::run_experiment(cfg);
  const auto r2 = loop::run_experiment(cfg);
  CHECK(csv_string(r1.metrics) == csv_string(r2.metrics));
  cfg.seed += 1;
  const auto r3 = loop::run_experiment(cfg);
  CHECK(csv_string(r1.metrics) != csv_string(r3.metrics));
}

TEST_CASE("csv header and wall_ms column default to deterministic output") {
  CHECK(std::string(loop::kMetricsCsvHeader) ==
        "step,interactivity,static,dynamic,smoothed,delta_norm,b0,b1,b2,b3,b4,b5,b6,b7,bnorm,"
        "wall_ms");
  ExperimentConfig cfg = small_config();
  cfg.steps = 3;
  const auto result = loop::run_experiment(cfg);
  for (const auto& rec : result.metrics) CHECK(rec.wall_ms == 0.0);
  const std::string csv = csv_string(result.metrics);
  // every data row ends with ",0"
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) CHECK(line.substr(line.size() - 2) == ",0");
}

TEST_CASE("log_every thins the metrics stream") {
  ExperimentConfig cfg = small_config();
  cfg.steps = 20;
  cfg.log_every = 5;
  const auto result = loop::run_experiment(cfg);
  REQUIRE(result.metrics.size() == 4);
  CHECK(result.metrics[0].step == 0);
  CHECK(result.metrics[1].step == 5);
  CHECK(result.metrics[3].step == 15);
}
