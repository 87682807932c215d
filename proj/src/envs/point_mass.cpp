#include "catrl/envs/point_mass.hpp"

#include <cmath>
#include <random>

namespace catrl::envs {

namespace {

double num_field(const nlohmann::json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string("config field 'env.") + key + "' must be a number");
  }
  return v.get<double>();
}

int int_field(const nlohmann::json& cfg, const char* key, int fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("config field 'env.") + key + "' must be an integer");
  }
  return v.get<int>();
}

}  // namespace

PointMassParams PointMassParams::from_json(const nlohmann::json& cfg) {
  PointMassParams p;
  p.dt = num_field(cfg, "dt", p.dt);
  p.substeps = int_field(cfg, "substeps", p.substeps);
  p.episode_length = int_field(cfg, "episode_length", p.episode_length);
  p.drag = num_field(cfg, "drag", p.drag);
  p.action_max = num_field(cfg, "action_max", p.action_max);
  p.arena_half_extent = num_field(cfg, "arena_half_extent", p.arena_half_extent);
  p.vx_min = num_field(cfg, "vx_min", p.vx_min);
  p.vx_max = num_field(cfg, "vx_max", p.vx_max);
  p.vy_min = num_field(cfg, "vy_min", p.vy_min);
  p.vy_max = num_field(cfg, "vy_max", p.vy_max);
  p.p_still = num_field(cfg, "p_still", p.p_still);
  p.reward_constant = num_field(cfg, "reward_constant", p.reward_constant);
  p.eps_track = num_field(cfg, "eps_track", p.eps_track);
  p.style_zone_min_x = num_field(cfg, "style_zone_min_x", p.style_zone_min_x);
  if (cfg.contains("fixed_command")) {
    const auto& fc = cfg.at("fixed_command");
    if (!fc.is_array() || fc.size() != 2 || !fc[0].is_number() || !fc[1].is_number()) {
      throw ConfigError("config field 'env.fixed_command' must be an array of two numbers");
    }
    p.has_fixed_command = true;
    p.fixed_command = Vector2d(fc[0].get<double>(), fc[1].get<double>());
  }

  if (p.dt <= 0.0) throw ConfigError("config field 'env.dt' must be positive");
  if (p.substeps < 1) throw ConfigError("config field 'env.substeps' must be at least 1");
  if (p.episode_length < 1) throw ConfigError("config field 'env.episode_length' must be at least 1");
  if (p.drag < 0.0) throw ConfigError("config field 'env.drag' must be non-negative");
  if (p.action_max <= 0.0) throw ConfigError("config field 'env.action_max' must be positive");
  if (p.arena_half_extent <= 0.0) {
    throw ConfigError("config field 'env.arena_half_extent' must be positive");
  }
  if (p.vx_min > p.vx_max) throw ConfigError("config field 'env.vx_min' exceeds 'env.vx_max'");
  if (p.vy_min > p.vy_max) throw ConfigError("config field 'env.vy_min' exceeds 'env.vy_max'");
  if (p.p_still < 0.0 || p.p_still > 1.0) {
    throw ConfigError("config field 'env.p_still' must lie in [0, 1]");
  }
  if (p.eps_track <= 0.0) throw ConfigError("config field 'env.eps_track' must be positive");
  return p;
}

PointMassEnv::PointMassEnv(const PointMassParams& params, TaskMode mode)
    : params_(params), mode_(mode), rng_(make_rng(0, kEnvStreamBase)) {
  reset();
}

void PointMassEnv::seed(std::uint64_t stream_seed) { rng_.seed(stream_seed); }

void PointMassEnv::reset() {
  position_.setZero();
  velocity_.setZero();
  accel_prev_.setZero();
  steps_taken_ = 0;
  timed_out_ = false;

  if (params_.has_fixed_command) {
    command_ = params_.fixed_command;
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng_) < params_.p_still) {
    command_.setZero();
  } else {
    std::uniform_real_distribution<double> vx(params_.vx_min, params_.vx_max);
    std::uniform_real_distribution<double> vy(params_.vy_min, params_.vy_max);
    command_ = Vector2d(vx(rng_), vy(rng_));
  }
}

VectorXd PointMassEnv::observation() const {
  VectorXd obs(8);
  obs << position_ / params_.arena_half_extent, velocity_, command_,
      accel_prev_ / params_.action_max;
  return obs;
}

Transition PointMassEnv::step(const VectorXd& action) {
  if (timed_out_) {
    throw TrainingError("point mass stepped after timeout without reset");
  }
  if (action.size() != 2) {
    throw ConfigError("point mass expects a 2-dimensional action, got " +
                      std::to_string(action.size()));
  }
  if (!action.allFinite()) {
    throw TrainingError("point mass received a non-finite action");
  }

  Transition t;
  t.obs_before = observation();
  t.action_raw = action;
  t.dt = params_.dt;
  t.accel_prev = accel_prev_;
  t.command = command_;

  Vector2d accel = action.head<2>();
  const double norm = accel.norm();
  if (norm > params_.action_max) accel *= params_.action_max / norm;

  const double h = params_.dt / params_.substeps;
  for (int k = 0; k < params_.substeps; ++k) {
    velocity_ += h * (accel - params_.drag * velocity_);
    position_ += h * velocity_;
  }
  accel_prev_ = accel;

  ++steps_taken_;
  timed_out_ = steps_taken_ >= params_.episode_length;

  t.position = position_;
  t.velocity = velocity_;
  t.accel = accel;
  if (mode_ == TaskMode::Constraint) {
    t.reward = 1.0;
  } else {
    const double err2 = (command_ - velocity_).squaredNorm();
    t.reward = std::exp(-err2 / 0.25) + params_.reward_constant;
  }
  t.obs_after = observation();
  t.timeout = timed_out_;
  return t;
}

const ConstraintRegistry& PointMassEnv::registry() const { return point_mass_registry(); }

bool PointMassEnv::episode_success(const std::vector<Transition>& episode) const {
  if (episode.empty()) return false;
  double err_sum = 0.0;
  for (const auto& t : episode) err_sum += (t.command - t.velocity).norm();
  return err_sum / static_cast<double>(episode.size()) < params_.eps_track;
}

void PointMassEnv::eval_stats(const Transition& t,
                              std::map<std::string, std::vector<double>>& out) const {
  out["speed"].push_back(t.velocity.norm());
  out["tracking_error"].push_back((t.command - t.velocity).norm());
  out["accel_norm"].push_back(t.accel.norm());
}

void PointMassEnv::set_state(const Vector2d& position, const Vector2d& velocity) {
  position_ = position;
  velocity_ = velocity;
}

void PointMassEnv::set_command(const Vector2d& command) { command_ = command; }

const ConstraintRegistry& point_mass_registry() {
  static const ConstraintRegistry reg = [] {
    ConstraintRegistry r;
    r.violations["arena_bound"] = [](const nlohmann::json& p) -> ViolationFn {
      const double half = require_param(p, "half_extent");
      return [half](const Transition& t) {
        return t.position.cwiseAbs().maxCoeff() - half;
      };
    };
    r.violations["force_limit"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) { return t.accel.norm() - limit; };
    };
    r.violations["action_rate_limit"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) {
        return (t.accel - t.accel_prev).norm() / t.dt - limit;
      };
    };
    r.violations["speed_limit"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) { return t.velocity.norm() - limit; };
    };
    r.violations["stand_still"] = [](const nlohmann::json& p) -> ViolationFn {
      const double eps = require_param(p, "epsilon");
      return [eps](const Transition& t) {
        if (t.command.norm() > 0.0) return 0.0;
        return t.velocity.norm() - eps;
      };
    };
    r.violations["velocity_tracking"] = [](const nlohmann::json& p) -> ViolationFn {
      const double eps = require_param(p, "epsilon");
      return [eps](const Transition& t) { return (t.command - t.velocity).norm() - eps; };
    };
    r.violations["heading_alignment"] = [](const nlohmann::json& p) -> ViolationFn {
      const double max_angle = require_param(p, "max_angle");
      const double min_speed = param_or(p, "min_speed", 0.05);
      Vector2d axis(param_or(p, "axis_x", 1.0), param_or(p, "axis_y", 0.0));
      if (axis.norm() == 0.0) {
        throw ConfigError("heading_alignment axis must be non-zero");
      }
      axis.normalize();
      return [max_angle, min_speed, axis](const Transition& t) {
        if (t.velocity.norm() < min_speed) return -max_angle;
        const double dot = t.velocity.dot(axis);
        const double cross = t.velocity.x() * axis.y() - t.velocity.y() * axis.x();
        return std::atan2(std::abs(cross), dot) - max_angle;
      };
    };
    r.gates["style_zone"] = [](const nlohmann::json& p) -> GateFn {
      const double min_x = require_param(p, "min_x");
      return [min_x](const Transition& t) { return t.position.x() >= min_x; };
    };
    return r;
  }();
  return reg;
}

nlohmann::json point_mass_default_constraints(TaskMode mode) {
  nlohmann::json c = nlohmann::json::object();
  c["arena"] = {{"kind", "hard"},
                {"fn", "arena_bound"},
                {"group", "safety"},
                {"params", {{"half_extent", 12.0}}}};
  c["force"] = {{"kind", "hard"},
                {"fn", "force_limit"},
                {"group", "safety"},
                {"params", {{"limit", 3.0}}}};
  c["accel_rate"] = {{"kind", "soft"},
                     {"fn", "action_rate_limit"},
                     {"group", "style"},
                     {"params", {{"limit", 60.0}}}};
  c["speed"] = {{"kind", "soft"},
                {"fn", "speed_limit"},
                {"group", "style"},
                {"params", {{"limit", 1.5}}}};
  c["stand_still"] = {{"kind", "soft"},
                      {"fn", "stand_still"},
                      {"group", "style"},
                      {"params", {{"epsilon", 0.05}}}};
  c["heading"] = {{"kind", "soft"},
                  {"fn", "heading_alignment"},
                  {"group", "style"},
                  {"gate", "style_zone"},
                  {"gate_params", {{"min_x", 1.0}}},
                  {"params", {{"max_angle", 0.5}}}};
  if (mode == TaskMode::Constraint) {
    c["track"] = {{"kind", "soft"},
                  {"fn", "velocity_tracking"},
                  {"group", "task"},
                  {"params", {{"epsilon", 0.2}}}};
  }
  return c;
}

}  // namespace catrl::envs
