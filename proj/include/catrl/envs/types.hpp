#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "catrl/common.hpp"
#include "catrl/constraints/types.hpp"

namespace catrl::envs {

/// Task through a shaped tracking reward (reward mode) or through tracking
/// constraints with a constant reward (constraint mode).
enum class TaskMode { Reward, Constraint };

TaskMode task_mode_from_string(const std::string& name);
std::string to_string(TaskMode mode);

/// One completed environment step with everything constraint functions and
/// the learner need. Only the quantity fields of the owning environment type
/// are populated; the rest stay at their defaults.
struct Transition {
  VectorXd obs_before;
  VectorXd action_raw;
  VectorXd obs_after;
  double reward = 0.0;
  bool timeout = false;
  double dt = 0.0;

  // pendulum quantities (angle wrapped to (-pi, pi], 0 = upright)
  double angle = 0.0;
  double ang_vel = 0.0;
  double torque = 0.0;
  double torque_prev = 0.0;

  // point-mass quantities
  Vector2d position = Vector2d::Zero();
  Vector2d velocity = Vector2d::Zero();
  Vector2d accel = Vector2d::Zero();
  Vector2d accel_prev = Vector2d::Zero();
  Vector2d command = Vector2d::Zero();

  std::vector<constraints::ViolationRecord> violations;
};

using ViolationFn = std::function<double(const Transition&)>;
using GateFn = std::function<bool(const Transition&)>;

/// Named factories for an environment's constraint functions and gates.
/// A factory receives the parameter object from the constraint's config
/// entry and returns the bound function.
struct ConstraintRegistry {
  std::map<std::string, std::function<ViolationFn(const nlohmann::json&)>> violations;
  std::map<std::string, std::function<GateFn(const nlohmann::json&)>> gates;
};

/// Reads a required numeric parameter, throwing a ConfigError that names the
/// missing or ill-typed field.
double require_param(const nlohmann::json& params, const std::string& key);
double param_or(const nlohmann::json& params, const std::string& key, double fallback);

}  // namespace catrl::envs
