#include "interactivity/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace interactivity::sweep {

double final_window_mean(const std::vector<loop::MetricsRecord>& metrics, double fraction) {
  if (metrics.empty()) return 0.0;
  const size_t start = metrics.size() - std::max<size_t>(
      1, static_cast<size_t>(fraction * static_cast<double>(metrics.size())));
  double sum = 0.0;
  for (size_t i = start; i < metrics.size(); ++i) sum += metrics[i].smoothed_interactivity;
  return sum / static_cast<double>(metrics.size() - start);
}

SweepResult run_sweep(const SweepGrid& grid, int workers) {
  if (workers < 1) throw std::invalid_argument("run_sweep: workers must be >= 1");
  SweepResult result;
  for (int width : grid.widths)
    for (int depth : grid.depths)
      for (models::Activation activation : grid.activations)
        for (std::uint64_t seed : grid.seeds) {
          SweepCell cell;
          cell.width = width;
          cell.depth = depth;
          cell.activation = activation;
          cell.seed = seed;
          result.cells.push_back(std::move(cell));
        }

  std::atomic<size_t> next{0};
  auto worker = [&result, &grid, &next] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      SweepCell& cell = result.cells[i];
      loop::ExperimentConfig cfg = grid.base;
      cfg.width = cell.width;
      cfg.depth = cell.depth;
      cfg.activation = cell.activation;
      cfg.seed = cell.seed;
      try {
        loop::RunResult run = loop::run_experiment(cfg);
        cell.status = run.status;
        cell.error = run.divergence_message;
        cell.metrics = std::move(run.metrics);
        cell.final_window_mean = final_window_mean(cell.metrics, grid.final_window_fraction);
      } catch (const std::exception& e) {
        cell.status = loop::RunStatus::Diverged;
        cell.error = e.what();
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

std::string cell_basename(const SweepCell& cell) {
  return "run_w" + std::to_string(cell.width) + "_d" + std::to_string(cell.depth) + "_" +
         models::to_string(cell.activation) + "_s" + std::to_string(cell.seed);
}

void write_summary_csv(std::ostream& out, const SweepResult& result) {
  out << "width,depth,activation,seed,status,final_window_mean\n";
  for (const SweepCell& cell : result.cells) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", cell.final_window_mean);
    out << cell.width << ',' << cell.depth << ',' << models::to_string(cell.activation) << ','
        << cell.seed << ','
        << (cell.status == loop::RunStatus::Completed ? "ok" : "diverged") << ',' << buf << '\n';
  }
}

}  // namespace interactivity::sweep
