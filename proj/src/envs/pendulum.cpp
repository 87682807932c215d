#include "catrl/envs/pendulum.hpp"

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

double wrap_angle(double theta) {
  // maps to [-pi, pi]; both endpoints describe the same hanging state
  return std::remainder(theta, 2.0 * M_PI);
}

}  // namespace

PendulumParams PendulumParams::from_json(const nlohmann::json& cfg) {
  PendulumParams p;
  p.dt = num_field(cfg, "dt", p.dt);
  p.substeps = int_field(cfg, "substeps", p.substeps);
  p.episode_length = int_field(cfg, "episode_length", p.episode_length);
  p.mass = num_field(cfg, "mass", p.mass);
  p.length = num_field(cfg, "length", p.length);
  p.gravity = num_field(cfg, "gravity", p.gravity);
  p.damping = num_field(cfg, "damping", p.damping);
  p.action_max = num_field(cfg, "action_max", p.action_max);
  p.obs_vel_scale = num_field(cfg, "obs_vel_scale", p.obs_vel_scale);
  p.init_angle_range = num_field(cfg, "init_angle_range", p.init_angle_range);
  p.init_vel_range = num_field(cfg, "init_vel_range", p.init_vel_range);
  p.reward_constant = num_field(cfg, "reward_constant", p.reward_constant);
  p.reward_peak_weight = num_field(cfg, "reward_peak_weight", p.reward_peak_weight);
  p.reward_dense_weight = num_field(cfg, "reward_dense_weight", p.reward_dense_weight);
  p.reward_vel_weight = num_field(cfg, "reward_vel_weight", p.reward_vel_weight);
  p.upright_angle = num_field(cfg, "upright_angle", p.upright_angle);

  if (p.dt <= 0.0) throw ConfigError("config field 'env.dt' must be positive");
  if (p.substeps < 1) throw ConfigError("config field 'env.substeps' must be at least 1");
  if (p.episode_length < 1) throw ConfigError("config field 'env.episode_length' must be at least 1");
  if (p.mass <= 0.0) throw ConfigError("config field 'env.mass' must be positive");
  if (p.length <= 0.0) throw ConfigError("config field 'env.length' must be positive");
  if (p.damping < 0.0) throw ConfigError("config field 'env.damping' must be non-negative");
  if (p.action_max <= 0.0) throw ConfigError("config field 'env.action_max' must be positive");
  if (p.obs_vel_scale <= 0.0) throw ConfigError("config field 'env.obs_vel_scale' must be positive");
  if (p.init_angle_range < 0.0)
    throw ConfigError("config field 'env.init_angle_range' must be non-negative");
  if (p.init_vel_range < 0.0)
    throw ConfigError("config field 'env.init_vel_range' must be non-negative");
  return p;
}

PendulumEnv::PendulumEnv(const PendulumParams& params, TaskMode mode)
    : params_(params), mode_(mode), rng_(make_rng(0, kEnvStreamBase)) {
  reset();
}

void PendulumEnv::seed(std::uint64_t stream_seed) { rng_.seed(stream_seed); }

void PendulumEnv::reset() {
  // start anywhere on the circle (centred on hanging) with a small spin, so
  // early rollouts already visit the upright region
  std::uniform_real_distribution<double> angle_noise(-params_.init_angle_range,
                                                     params_.init_angle_range);
  std::uniform_real_distribution<double> vel_noise(-params_.init_vel_range,
                                                   params_.init_vel_range);
  angle_ = wrap_angle(M_PI + angle_noise(rng_));
  ang_vel_ = vel_noise(rng_);
  torque_prev_ = 0.0;
  steps_taken_ = 0;
  timed_out_ = false;
}

VectorXd PendulumEnv::observation() const {
  VectorXd obs(4);
  obs << std::cos(angle_), std::sin(angle_), ang_vel_ / params_.obs_vel_scale,
      torque_prev_ / params_.action_max;
  return obs;
}

double PendulumEnv::reward_for(double angle, double ang_vel) const {
  if (mode_ == TaskMode::Constraint) return 1.0;
  // the peak pays for *balancing* upright, not for spinning through it
  const double peak =
      std::exp(-angle * angle - params_.reward_vel_weight * ang_vel * ang_vel);
  const double dense = 0.5 * (1.0 + std::cos(angle));
  return params_.reward_peak_weight * peak + params_.reward_dense_weight * dense +
         params_.reward_constant;
}

Transition PendulumEnv::step(const VectorXd& action) {
  if (timed_out_) {
    throw TrainingError("pendulum stepped after timeout without reset");
  }
  if (action.size() != 1) {
    throw ConfigError("pendulum expects a 1-dimensional action, got " +
                      std::to_string(action.size()));
  }
  if (!action.allFinite()) {
    throw TrainingError("pendulum received a non-finite action");
  }

  Transition t;
  t.obs_before = observation();
  t.action_raw = action;
  t.dt = params_.dt;
  t.torque_prev = torque_prev_;

  const double u = std::clamp(action(0), -params_.action_max, params_.action_max);
  const double inertia = params_.mass * params_.length * params_.length / 3.0;
  const double grav_coeff = 1.5 * params_.gravity / params_.length;
  const double h = params_.dt / params_.substeps;
  for (int k = 0; k < params_.substeps; ++k) {
    const double acc =
        grav_coeff * std::sin(angle_) + (u - params_.damping * ang_vel_) / inertia;
    ang_vel_ += h * acc;
    angle_ += h * ang_vel_;
  }
  angle_ = wrap_angle(angle_);
  torque_prev_ = u;

  ++steps_taken_;
  timed_out_ = steps_taken_ >= params_.episode_length;

  t.angle = angle_;
  t.ang_vel = ang_vel_;
  t.torque = u;
  t.reward = reward_for(angle_, ang_vel_);
  t.obs_after = observation();
  t.timeout = timed_out_;
  return t;
}

const ConstraintRegistry& PendulumEnv::registry() const { return pendulum_registry(); }

bool PendulumEnv::episode_success(const std::vector<Transition>& episode) const {
  if (episode.empty()) return false;
  const std::size_t window = std::min<std::size_t>(100, episode.size());
  std::size_t upright = 0;
  for (std::size_t i = episode.size() - window; i < episode.size(); ++i) {
    if (std::abs(episode[i].angle) < params_.upright_angle) ++upright;
  }
  return upright * 2 >= window;
}

void PendulumEnv::eval_stats(const Transition& t,
                             std::map<std::string, std::vector<double>>& out) const {
  out["upright"].push_back(std::abs(t.angle) < params_.upright_angle ? 1.0 : 0.0);
  out["abs_torque"].push_back(std::abs(t.torque));
  out["abs_ang_vel"].push_back(std::abs(t.ang_vel));
}

void PendulumEnv::set_state(double angle, double ang_vel) {
  angle_ = wrap_angle(angle);
  ang_vel_ = ang_vel;
}

double PendulumEnv::total_energy() const {
  const double inertia = params_.mass * params_.length * params_.length / 3.0;
  const double kinetic = 0.5 * inertia * ang_vel_ * ang_vel_;
  const double potential =
      params_.mass * params_.gravity * 0.5 * params_.length * std::cos(angle_);
  return kinetic + potential;
}

const ConstraintRegistry& pendulum_registry() {
  static const ConstraintRegistry reg = [] {
    ConstraintRegistry r;
    r.violations["torque_limit"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) { return std::abs(t.torque) - limit; };
    };
    r.violations["velocity_limit"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) { return std::abs(t.ang_vel) - limit; };
    };
    r.violations["action_rate_limit"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) {
        return std::abs(t.torque - t.torque_prev) / t.dt - limit;
      };
    };
    r.violations["upright_tracking"] = [](const nlohmann::json& p) -> ViolationFn {
      const double eps = require_param(p, "epsilon");
      return [eps](const Transition& t) { return std::abs(t.angle) - eps; };
    };
    // indicator-style: +1 when crossing the upright window faster than `limit`,
    // -1 otherwise, so every violation counts with the same full magnitude
    r.violations["upright_overspeed"] = [](const nlohmann::json& p) -> ViolationFn {
      const double angle = require_param(p, "angle");
      const double limit = require_param(p, "limit");
      return [angle, limit](const Transition& t) {
        const bool fast_pass = std::abs(t.angle) < angle && std::abs(t.ang_vel) > limit;
        return fast_pass ? 1.0 : -1.0;
      };
    };
    // indicator twin of action_rate_limit for event-like torque slew spikes
    r.violations["action_rate_spike"] = [](const nlohmann::json& p) -> ViolationFn {
      const double limit = require_param(p, "limit");
      return [limit](const Transition& t) {
        return std::abs(t.torque - t.torque_prev) / t.dt > limit ? 1.0 : -1.0;
      };
    };
    return r;
  }();
  return reg;
}

nlohmann::json pendulum_default_constraints(TaskMode mode) {
  nlohmann::json c = nlohmann::json::object();
  c["torque"] = {{"kind", "soft"},
                 {"fn", "torque_limit"},
                 {"group", "safety"},
                 {"params", {{"limit", 2.0}}}};
  c["ang_vel"] = {{"kind", "soft"},
                  {"fn", "velocity_limit"},
                  {"group", "safety"},
                  {"params", {{"limit", 6.0}}}};
  c["torque_rate"] = {{"kind", "soft"},
                      {"fn", "action_rate_spike"},
                      {"group", "style"},
                      {"params", {{"limit", 20.0}}}};
  c["flythrough"] = {{"kind", "soft"},
                     {"fn", "upright_overspeed"},
                     {"group", "style"},
                     {"params", {{"angle", 0.9}, {"limit", 0.6}}}};
  if (mode == TaskMode::Constraint) {
    c["upright"] = {{"kind", "soft"},
                    {"fn", "upright_tracking"},
                    {"group", "task"},
                    {"params", {{"epsilon", 0.3}}}};
  }
  return c;
}

}  // namespace catrl::envs
