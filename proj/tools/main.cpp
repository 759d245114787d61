#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "interactivity/automaton.hpp"
#include "interactivity/config.hpp"
#include "interactivity/gradcheck.hpp"
#include "interactivity/life.hpp"
#include "interactivity/loop.hpp"
#include "interactivity/svg.hpp"
#include "interactivity/sweep.hpp"
#include "interactivity/turing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace interactivity;

namespace {

// Exit codes: 0 success, 1 usage/config, 2 divergence, 3 verification failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitVerification = 3;

constexpr const char* kVersion = "iseek 1.0.0";

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::string output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("ISEEK_OUTPUT_ROOT")) return env;
  return ".";
}

void write_manifest(const fs::path& path, const loop::ExperimentConfig& cfg, double wall_ms,
                    const std::string& status) {
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config::experiment_config_to_json(cfg);
  manifest["seed"] = cfg.seed;
  manifest["status"] = status;
  manifest["wall_time_ms"] = wall_ms;
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir) {
  json j = config_path.empty() ? json::object() : load_json(config_path);
  j = config::apply_overrides(j, overrides);
  loop::ExperimentConfig cfg = config::experiment_config_from_json(j);

  const fs::path root = output_root(out_dir);
  fs::create_directories(root);
  const auto t0 = std::chrono::steady_clock::now();
  loop::RunResult result = loop::run_experiment(cfg);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  loop::write_metrics_csv((root / "metrics.csv").string(), result.metrics);
  loop::write_checkpoint((root / "checkpoint.json").string(), result.final_state, cfg);
  const std::string status =
      result.status == loop::RunStatus::Completed ? "completed" : "diverged";
  write_manifest(root / "manifest.json", cfg, wall_ms, status);

  if (result.status == loop::RunStatus::Diverged) {
    std::cerr << "run diverged after " << result.steps_completed
              << " steps: " << result.divergence_message << "\n";
    return kExitDivergence;
  }
  std::cout << "completed " << result.steps_completed << " steps, " << result.metrics.size()
            << " records -> " << (root / "metrics.csv").string() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_dir, int workers) {
  json j = load_json(grid_path);
  sweep::SweepGrid grid;
  grid.base = config::experiment_config_from_json(j.at("base"));
  grid.widths = j.value("widths", std::vector<int>{grid.base.width});
  grid.depths = j.value("depths", std::vector<int>{grid.base.depth});
  if (j.contains("activations")) {
    for (const auto& a : j.at("activations"))
      grid.activations.push_back(models::activation_from_string(a.get<std::string>()));
  } else {
    grid.activations.push_back(grid.base.activation);
  }
  grid.seeds = j.value("seeds", std::vector<std::uint64_t>{grid.base.seed});
  grid.final_window_fraction = j.value("final_window_fraction", 0.2);

  const fs::path root = output_root(out_dir);
  fs::create_directories(root);
  sweep::SweepResult result = sweep::run_sweep(grid, workers);
  bool any_failed = false;
  for (const sweep::SweepCell& cell : result.cells) {
    loop::write_metrics_csv((root / (sweep::cell_basename(cell) + ".csv")).string(), cell.metrics);
    if (cell.status != loop::RunStatus::Completed) {
      any_failed = true;
      std::cerr << sweep::cell_basename(cell) << " failed: " << cell.error << "\n";
    }
  }
  std::ofstream summary(root / "summary.csv", std::ios::binary);
  sweep::write_summary_csv(summary, result);
  std::cout << result.cells.size() << " cells -> " << (root / "summary.csv").string() << "\n";
  return any_failed ? kExitDivergence : kExitOk;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty csv: " + path);
  std::stringstream header(line);
  std::string col;
  while (std::getline(header, col, ',')) table.columns.push_back(col);
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::vector<double> values;
    std::string cellv;
    while (std::getline(row, cellv, ',')) values.push_back(std::stod(cellv));
    if (values.size() != table.columns.size())
      throw std::invalid_argument("csv row width mismatch in " + path);
    table.rows.push_back(std::move(values));
  }
  return table;
}

size_t column_index(const CsvTable& table, const std::string& name, const std::string& path) {
  for (size_t i = 0; i < table.columns.size(); ++i)
    if (table.columns[i] == name) return i;
  throw std::invalid_argument("csv schema mismatch: missing column '" + name + "' in " + path);
}

int cmd_plot(const std::vector<std::string>& csv_paths, const std::string& kind,
             const std::string& out_path) {
  std::vector<svg::Series> series;
  for (const std::string& path : csv_paths) {
    CsvTable table = read_csv(path);
    const size_t step_col = column_index(table, "step", path);
    if (kind == "interactivity") {
      const size_t val_col = column_index(table, "smoothed", path);
      svg::Series s;
      s.label = fs::path(path).stem().string();
      for (const auto& row : table.rows) {
        s.x.push_back(row[step_col]);
        s.y.push_back(row[val_col]);
      }
      series.push_back(std::move(s));
    } else {  // actions
      for (int c = 0; c < 8; ++c) {
        const size_t val_col = column_index(table, "b" + std::to_string(c), path);
        svg::Series s;
        s.label = fs::path(path).stem().string() + ":b" + std::to_string(c);
        for (const auto& row : table.rows) {
          s.x.push_back(row[step_col]);
          s.y.push_back(row[val_col]);
        }
        series.push_back(std::move(s));
      }
    }
  }
  svg::write_line_plot(out_path, series, "step", "value",
                       kind == "interactivity" ? "smoothed interactivity" : "action components");
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_grad_check(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> d_dist(2, 8), width_dist(2, 16), depth_dist(1, 3),
      t_dist(1, 4), act_dist(0, 1);
  std::uniform_real_distribution<double> gamma_dist(0.0, 1.0), eta_dist(0.0, 0.05);
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    models::PolicySpec spec;
    spec.dim = d_dist(rng);
    spec.width = width_dist(rng);
    spec.depth = depth_dist(rng);
    spec.activation = act_dist(rng) ? models::Activation::Relu : models::Activation::Linear;
    models::PolicyParams theta = models::init_policy(spec, rng());
    models::ValueParams value = models::init_value(spec.dim, rng());
    Vector b0 = gaussian_vector(spec.dim, 1.0 / std::sqrt(spec.dim), rng);
    auto report = gradcheck::check_policy_gradient(theta, b0, t_dist(rng), value.W,
                                                   gamma_dist(rng), eta_dist(rng));
    worst = std::max(worst, report.relative_error);
    if (!report.ok) {
      ++failures;
      std::cerr << "grad-check config " << i << " FAILED, relative error "
                << report.relative_error << "\n";
    }
  }
  std::cout << (failures == 0 ? "PASS" : "FAIL") << ": " << count - failures << "/" << count
            << " configs within tolerance, worst relative error " << worst << "\n";
  return failures == 0 ? kExitOk : kExitVerification;
}

int cmd_life(const std::string& pattern_path, int steps, const std::string& expect_path,
             bool print) {
  ulenv::CellSet state = ulenv::load_pattern(pattern_path);
  state = ulenv::life_step_n(state, steps);
  if (print) ulenv::write_pattern(std::cout, state);
  if (!expect_path.empty()) {
    const ulenv::CellSet expected = ulenv::load_pattern(expect_path);
    if (state != expected) {
      std::cerr << "FAIL: pattern after " << steps << " steps differs from " << expect_path
                << "\n";
      std::cerr << "got:\n";
      ulenv::write_pattern(std::cerr, state);
      std::cerr << "expected:\n";
      ulenv::write_pattern(std::cerr, expected);
      return kExitVerification;
    }
    std::cout << "PASS: pattern matches " << expect_path << " after " << steps << " steps\n";
  }
  return kExitOk;
}

int cmd_tm(const std::string& spec_path, int steps) {
  ulenv::TuringMachineSpec spec =
      spec_path.empty() ? ulenv::binary_increment_tm() : ulenv::load_tm_spec(spec_path);
  ulenv::TmConfig direct = ulenv::tm_initial_config(spec, {});
  ulenv::TmMarkovState markov = ulenv::tm_encode(spec, direct);
  for (int t = 0; t < steps; ++t) {
    direct = ulenv::tm_step_direct(spec, direct);
    markov = ulenv::tm_markov_step(spec, markov);
    if (!(ulenv::tm_decode(spec, markov) == direct)) {
      std::cerr << "FAIL: configurations diverge at step " << t << "\n";
      return kExitVerification;
    }
  }
  std::cout << "PASS: Markov encoding matches the direct simulator for " << steps << " steps\n";
  return kExitOk;
}

int cmd_verify(bool locality, bool pomdp, int trials, std::uint64_t seed) {
  bool all_ok = true;
  if (locality) {
    const ulenv::CellSet F{{0, 0}};
    for (int k = 1; k <= 3; ++k) {
      auto verdict = ulenv::verify_locality(F, k, trials, seed + static_cast<std::uint64_t>(k));
      std::cout << (verdict.ok ? "PASS" : "FAIL") << ": locality k=" << k << ", " << trials
                << " trials\n";
      all_ok = all_ok && verdict.ok;
    }
    // A deliberately shrunken boundary (7 of 8 neighbours) must fail.
    ulenv::CellSet broken = ulenv::life_boundary(F, 1);
    broken.erase(broken.begin());
    auto verdict = ulenv::verify_locality(F, 1, broken, trials, seed);
    std::cout << (!verdict.ok ? "PASS" : "FAIL")
              << ": shrunken boundary rejected (counterexample at trial " << verdict.failed_trial
              << ")\n";
    all_ok = all_ok && !verdict.ok;
  }
  if (pomdp) {
    Rng rng(seed);
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      auto automaton = ulenv::random_automaton(3, 3, 3, rng());
      auto env = ulenv::random_env(3, 3, 3, rng());
      auto verdict = ulenv::verify_pomdp_equivalence(automaton, env, 0, 0, 0, 100);
      ok = ok && verdict.ok;
      if (!verdict.ok)
        std::cerr << "pomdp equivalence diverged at step " << verdict.first_divergence << "\n";
    }
    std::cout << (ok ? "PASS" : "FAIL") << ": automaton/POMDP dual-path equivalence\n";
    all_ok = all_ok && ok;

    // An update secretly reading the environment cell must be detected.
    auto automaton = ulenv::random_automaton(3, 3, 3, 7);
    auto env = ulenv::random_env(3, 3, 3, 8);
    auto cheat = [&automaton](int x, int theta, int e) {
      return (automaton.update[x][theta] + e) % automaton.num_states;
    };
    auto verdict = ulenv::verify_pomdp_equivalence(automaton, env, 0, 0, 0, 100, cheat);
    std::cout << (!verdict.ok ? "PASS" : "FAIL") << ": boundary-violating automaton detected\n";
    all_ok = all_ok && !verdict.ok;
  }
  return all_ok ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interactivity-seeking continual learning experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // run
  auto* run = app.add_subcommand("run", "run one experiment");
  std::string run_config, run_out;
  std::vector<std::string> run_overrides;
  run->add_option("--config", run_config, "experiment config JSON");
  run->add_option("--out", run_out, "output directory");
  run->add_option("overrides", run_overrides, "key=value config overrides");

  // sweep
  auto* swp = app.add_subcommand("sweep", "run a width/depth/activation/seed grid");
  std::string sweep_config, sweep_out;
  int sweep_workers = 1;
  swp->add_option("--config", sweep_config, "sweep grid JSON")->required();
  swp->add_option("--out", sweep_out, "output directory");
  swp->add_option("--workers", sweep_workers, "worker pool size");

  // plot
  auto* plot = app.add_subcommand("plot", "render metrics CSVs to SVG");
  std::vector<std::string> plot_csvs;
  std::string plot_kind = "interactivity", plot_out = "plot.svg";
  plot->add_option("csvs", plot_csvs, "metrics CSV paths")->required();
  plot->add_option("--kind", plot_kind, "interactivity | actions")
      ->check(CLI::IsMember({"interactivity", "actions"}));
  plot->add_option("--out", plot_out, "output SVG path");

  // grad-check
  auto* gc = app.add_subcommand("grad-check", "finite-difference check of the meta-gradient");
  int gc_count = 100;
  std::uint64_t gc_seed = 0;
  gc->add_option("--count", gc_count, "number of random configurations");
  gc->add_option("--seed", gc_seed, "random seed");

  // life
  auto* life = app.add_subcommand("life", "step a Game of Life pattern");
  std::string life_pattern, life_expect;
  int life_steps = 1;
  bool life_print = false;
  life->add_option("--pattern", life_pattern, "pattern file (x y per line)")->required();
  life->add_option("--steps", life_steps, "number of steps");
  life->add_option("--expect", life_expect, "expected pattern file to diff against");
  life->add_flag("--print", life_print, "print the resulting pattern");

  // tm
  auto* tm = app.add_subcommand("tm", "check the Turing-machine Markov encoding");
  std::string tm_spec;
  int tm_steps = 200;
  tm->add_option("--spec", tm_spec, "TM spec JSON (default: built-in binary increment)");
  tm->add_option("--steps", tm_steps, "number of steps");

  // verify
  auto* verify = app.add_subcommand("verify", "locality and POMDP-equivalence verifiers");
  bool v_locality = false, v_pomdp = false;
  int v_trials = 10000;
  std::uint64_t v_seed = 0;
  verify->add_flag("--locality", v_locality, "run the uniform-locality verifier");
  verify->add_flag("--pomdp", v_pomdp, "run the automaton/POMDP equivalence verifier");
  verify->add_option("--trials", v_trials, "randomized trials per check");
  verify->add_option("--seed", v_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_config, run_overrides, run_out);
    if (swp->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_workers);
    if (plot->parsed()) return cmd_plot(plot_csvs, plot_kind, plot_out);
    if (gc->parsed()) return cmd_grad_check(gc_count, gc_seed);
    if (life->parsed()) return cmd_life(life_pattern, life_steps, life_expect, life_print);
    if (tm->parsed()) return cmd_tm(tm_spec, tm_steps);
    if (verify->parsed()) {
      if (!v_locality && !v_pomdp) v_locality = v_pomdp = true;
      return cmd_verify(v_locality, v_pomdp, v_trials, v_seed);
    }
  } catch (const rollout::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
