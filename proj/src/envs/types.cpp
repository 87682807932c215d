#include "catrl/envs/types.hpp"

namespace catrl::envs {

TaskMode task_mode_from_string(const std::string& name) {
  if (name == "reward") return TaskMode::Reward;
  if (name == "constraint") return TaskMode::Constraint;
  throw ConfigError("unknown task mode '" + name + "' (expected 'reward' or 'constraint')");
}

std::string to_string(TaskMode mode) {
  return mode == TaskMode::Reward ? "reward" : "constraint";
}

double require_param(const nlohmann::json& params, const std::string& key) {
  if (!params.contains(key)) {
    throw ConfigError("missing required parameter '" + key + "'");
  }
  const auto& value = params.at(key);
  if (!value.is_number()) {
    throw ConfigError("parameter '" + key + "' must be a number");
  }
  return value.get<double>();
}

double param_or(const nlohmann::json& params, const std::string& key, double fallback) {
  if (!params.contains(key)) return fallback;
  const auto& value = params.at(key);
  if (!value.is_number()) {
    throw ConfigError("parameter '" + key + "' must be a number");
  }
  return value.get<double>();
}

}  // namespace catrl::envs
