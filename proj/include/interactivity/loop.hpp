#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "interactivity/models.hpp"
#include "interactivity/rollout.hpp"

namespace interactivity::loop {

struct ExperimentConfig {
  int d = 64;
  int T = 10;
  long steps = 10000;
  double gamma = 0.9;
  double eta_inner = 0.003;
  int depth = 2;
  int width = 64;
  models::Activation activation = models::Activation::Linear;
  bool bias = true;
  models::OptimizerConfig policy_opt;  // RMSProp 1e-3 by default
  models::OptimizerConfig value_opt;
  std::uint64_t seed = 0;
  long freeze_policy_at = -1;  // -1: never
  long freeze_value_at = -1;
  long log_every = 10;
  double smoothing_half_life = 200.0;  // steps, for the interactivity EMA
  bool detach_bootstrap = false;
  bool record_wall_time = false;  // off by default so metrics CSVs are deterministic

  models::PolicySpec policy_spec() const;
  void validate() const;  // throws std::invalid_argument listing bad fields
};

struct MetricsRecord {
  long step = 0;
  double interactivity = 0.0;
  double static_complexity = 0.0;
  double dynamic_complexity = 0.0;
  double smoothed_interactivity = 0.0;
  double committed_delta_norm = 0.0;
  double b[8] = {0, 0, 0, 0, 0, 0, 0, 0};  // first action components
  double behaviour_norm = 0.0;
  double wall_ms = 0.0;
};

struct RunState {
  Vector b;
  models::PolicyParams policy;
  models::ValueParams value;
  models::OptimizerState policy_opt_state;
  long step = 0;
  double smoothed_interactivity = 0.0;
  bool smoothed_initialized = false;
  long policy_updates = 0;  // counters: exactly one of each per unfrozen step
  long value_updates = 0;
};

RunState init_run(const ExperimentConfig& cfg);

/// One timestep of the online loop: imagined rollout, policy meta-gradient
/// step, real action with the updated policy, committed TD(0) value update.
/// Metrics are computed from the pre-update rollout.
MetricsRecord run_step(RunState& state, const ExperimentConfig& cfg);

enum class RunStatus { Completed, Diverged };

struct RunResult {
  RunStatus status = RunStatus::Completed;
  long steps_completed = 0;
  std::string divergence_message;
  std::vector<MetricsRecord> metrics;  // one record per log_every steps
  RunState final_state;
};

RunResult run_experiment(const ExperimentConfig& cfg);

enum class FreezeMode { FreezePolicy, FreezeValue, FreezeBoth };

/// Same loop with the designated component frozen from `freeze_step` onward.
RunResult run_control(ExperimentConfig cfg, FreezeMode mode, long freeze_step);

// --- persistence ------------------------------------------------------------

extern const char* const kMetricsCsvHeader;

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records);

/// Versioned JSON checkpoint with parameter arrays as number lists.
void write_checkpoint(const std::string& path, const RunState& state, const ExperimentConfig& cfg);

}  // namespace interactivity::loop
