#include "interactivity/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace interactivity::config {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& scope) {
  if (!j.is_object()) throw std::invalid_argument("config: " + scope + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + scope + it.key() + "'");
  }
}

models::OptimizerConfig optimizer_from_json(const json& j, const std::string& scope,
                                            const models::OptimizerConfig& defaults) {
  check_keys(j, {"kind", "step_size", "decay", "epsilon", "beta1"}, scope);
  models::OptimizerConfig opt = defaults;
  if (j.contains("kind")) opt.kind = models::optimizer_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("step_size")) opt.step_size = j.at("step_size").get<double>();
  if (j.contains("decay")) opt.decay = j.at("decay").get<double>();
  if (j.contains("epsilon")) opt.epsilon = j.at("epsilon").get<double>();
  if (j.contains("beta1")) opt.beta1 = j.at("beta1").get<double>();
  return opt;
}

json optimizer_to_json(const models::OptimizerConfig& opt) {
  return {{"kind", models::to_string(opt.kind)},
          {"step_size", opt.step_size},
          {"decay", opt.decay},
          {"epsilon", opt.epsilon},
          {"beta1", opt.beta1}};
}

}  // namespace

loop::ExperimentConfig experiment_config_from_json(const json& j) {
  static const std::set<std::string> allowed = {
      "d",         "T",        "steps",           "gamma",
      "eta_inner", "depth",    "width",           "activation",
      "bias",      "seed",     "freeze_policy_at", "freeze_value_at",
      "log_every", "smoothing_half_life",          "detach_bootstrap",
      "record_wall_time",      "policy_optimizer", "value_optimizer"};
  check_keys(j, allowed, "");

  loop::ExperimentConfig cfg;
  if (j.contains("d")) cfg.d = j.at("d").get<int>();
  if (j.contains("T")) cfg.T = j.at("T").get<int>();
  if (j.contains("steps")) cfg.steps = j.at("steps").get<long>();
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
  if (j.contains("eta_inner")) cfg.eta_inner = j.at("eta_inner").get<double>();
  if (j.contains("depth")) cfg.depth = j.at("depth").get<int>();
  if (j.contains("width")) cfg.width = j.at("width").get<int>();
  if (j.contains("activation"))
    cfg.activation = models::activation_from_string(j.at("activation").get<std::string>());
  if (j.contains("bias")) cfg.bias = j.at("bias").get<bool>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("freeze_policy_at")) cfg.freeze_policy_at = j.at("freeze_policy_at").get<long>();
  if (j.contains("freeze_value_at")) cfg.freeze_value_at = j.at("freeze_value_at").get<long>();
  if (j.contains("log_every")) cfg.log_every = j.at("log_every").get<long>();
  if (j.contains("smoothing_half_life"))
    cfg.smoothing_half_life = j.at("smoothing_half_life").get<double>();
  if (j.contains("detach_bootstrap")) cfg.detach_bootstrap = j.at("detach_bootstrap").get<bool>();
  if (j.contains("record_wall_time")) cfg.record_wall_time = j.at("record_wall_time").get<bool>();
  if (j.contains("policy_optimizer"))
    cfg.policy_opt = optimizer_from_json(j.at("policy_optimizer"), "policy_optimizer.", cfg.policy_opt);
  if (j.contains("value_optimizer"))
    cfg.value_opt = optimizer_from_json(j.at("value_optimizer"), "value_optimizer.", cfg.value_opt);
  cfg.validate();
  return cfg;
}

json experiment_config_to_json(const loop::ExperimentConfig& cfg) {
  json j;
  j["d"] = cfg.d;
  j["T"] = cfg.T;
  j["steps"] = cfg.steps;
  j["gamma"] = cfg.gamma;
  j["eta_inner"] = cfg.eta_inner;
  j["depth"] = cfg.depth;
  j["width"] = cfg.width;
  j["activation"] = models::to_string(cfg.activation);
  j["bias"] = cfg.bias;
  j["seed"] = cfg.seed;
  j["freeze_policy_at"] = cfg.freeze_policy_at;
  j["freeze_value_at"] = cfg.freeze_value_at;
  j["log_every"] = cfg.log_every;
  j["smoothing_half_life"] = cfg.smoothing_half_life;
  j["detach_bootstrap"] = cfg.detach_bootstrap;
  j["record_wall_time"] = cfg.record_wall_time;
  j["policy_optimizer"] = optimizer_to_json(cfg.policy_opt);
  j["value_optimizer"] = optimizer_to_json(cfg.value_opt);
  return j;
}

loop::ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

json apply_overrides(json j, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be key=value: " + ov);
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // bare strings like activation=relu

    json* cursor = &j;
    size_t pos = 0;
    while (true) {
      const size_t dot = key.find('.', pos);
      const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (part.empty()) throw std::invalid_argument("override has empty key segment: " + ov);
      if (dot == std::string::npos) {
        (*cursor)[part] = value;
        break;
      }
      cursor = &(*cursor)[part];
      pos = dot + 1;
    }
  }
  return j;
}

}  // namespace interactivity::config
