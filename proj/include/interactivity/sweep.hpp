#pragma once

#include <string>
#include <vector>

#include "interactivity/loop.hpp"

namespace interactivity::sweep {

/// Cartesian grid over widths, depths, activations, and seeds on top of a
/// base configuration. Cells run independently; summaries aggregate the mean
/// smoothed interactivity over the final window of each run.
struct SweepGrid {
  loop::ExperimentConfig base;
  std::vector<int> widths;
  std::vector<int> depths;
  std::vector<models::Activation> activations;
  std::vector<std::uint64_t> seeds;
  double final_window_fraction = 0.2;
};

struct SweepCell {
  int width = 0;
  int depth = 0;
  models::Activation activation = models::Activation::Linear;
  std::uint64_t seed = 0;
  loop::RunStatus status = loop::RunStatus::Completed;
  std::string error;  // divergence or config failure; sweep continues
  double final_window_mean = 0.0;  // mean smoothed interactivity, last window
  std::vector<loop::MetricsRecord> metrics;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // grid order: width, depth, activation, seed
};

double final_window_mean(const std::vector<loop::MetricsRecord>& metrics, double fraction);

/// Runs all cells on a bounded worker pool. Results are identical for any
/// worker count; summary order is grid order.
SweepResult run_sweep(const SweepGrid& grid, int workers);

std::string cell_basename(const SweepCell& cell);

void write_summary_csv(std::ostream& out, const SweepResult& result);

}  // namespace interactivity::sweep
