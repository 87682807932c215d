#pragma once

#include <json.hpp>

#include "catrl/envs/env.hpp"

namespace catrl::envs {

struct PointMassParams {
  double dt = 0.05;
  int substeps = 1;
  int episode_length = 200;
  double drag = 0.1;
  double action_max = 6.0;        // acceleration commands are norm-clipped to this
  double arena_half_extent = 12.0;
  double vx_min = -0.3, vx_max = 1.0;   // sampled command range, forward axis
  double vy_min = -0.7, vy_max = 0.7;   // sampled command range, lateral axis
  double p_still = 0.1;           // probability of a zero command episode
  double reward_constant = 0.5;
  double eps_track = 0.2;         // tracking tolerance for success judgement
  double style_zone_min_x = 1.0;  // default style-zone boundary (used by presets)
  bool has_fixed_command = false; // override command sampling (evaluation probes)
  Vector2d fixed_command = Vector2d::Zero();

  static PointMassParams from_json(const nlohmann::json& cfg);
};

/// Planar point mass with drag, driven by a norm-clipped acceleration
/// command. The task is to track a per-episode velocity command sampled at
/// reset (occasionally the zero command, i.e. stand still).
class PointMassEnv final : public Environment {
 public:
  PointMassEnv(const PointMassParams& params, TaskMode mode);

  std::string name() const override { return "point_mass"; }
  int observation_dim() const override { return 8; }
  int action_dim() const override { return 2; }
  int episode_length() const override { return params_.episode_length; }

  void seed(std::uint64_t stream_seed) override;
  void reset() override;
  VectorXd observation() const override;
  Transition step(const VectorXd& action) override;
  const ConstraintRegistry& registry() const override;
  bool episode_success(const std::vector<Transition>& episode) const override;
  void eval_stats(const Transition& t,
                  std::map<std::string, std::vector<double>>& out) const override;

  // direct state access for physics checks
  void set_state(const Vector2d& position, const Vector2d& velocity);
  void set_command(const Vector2d& command);
  const Vector2d& position() const { return position_; }
  const Vector2d& velocity() const { return velocity_; }
  const Vector2d& command() const { return command_; }

  const PointMassParams& params() const { return params_; }

 private:
  PointMassParams params_;
  TaskMode mode_;
  Rng rng_;
  Vector2d position_ = Vector2d::Zero();
  Vector2d velocity_ = Vector2d::Zero();
  Vector2d accel_prev_ = Vector2d::Zero();
  Vector2d command_ = Vector2d::Zero();
  int steps_taken_ = 0;
  bool timed_out_ = false;
};

/// Registry of constraint functions over point-mass transitions:
///   violations: arena_bound(half_extent), force_limit(limit),
///               action_rate_limit(limit), speed_limit(limit),
///               stand_still(epsilon), velocity_tracking(epsilon),
///               heading_alignment(max_angle[, min_speed, axis_x, axis_y])
///   gates: style_zone(min_x)
const ConstraintRegistry& point_mass_registry();

/// Default constraint declarations for the point-mass task in each mode, in
/// the form consumed by the experiment config ("constraints" section).
nlohmann::json point_mass_default_constraints(TaskMode mode);

}  // namespace catrl::envs
