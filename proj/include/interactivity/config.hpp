#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "interactivity/loop.hpp"

namespace interactivity::config {

/// Strict parse: unknown keys are errors, not warnings.
loop::ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

nlohmann::json experiment_config_to_json(const loop::ExperimentConfig& cfg);

loop::ExperimentConfig load_experiment_config(const std::string& path);

/// Applies "dotted.key=value" overrides on top of a config JSON.
/// Values are parsed as JSON scalars, falling back to strings.
nlohmann::json apply_overrides(nlohmann::json j, const std::vector<std::string>& overrides);

}  // namespace interactivity::config
