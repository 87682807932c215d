#pragma once

#include <cmath>

#include <json.hpp>

#include "catrl/envs/env.hpp"

namespace catrl::envs {

struct PendulumParams {
  double dt = 0.05;
  int substeps = 10;
  int episode_length = 200;
  double mass = 1.0;
  double length = 1.0;
  double gravity = 10.0;
  double damping = 0.02;
  double action_max = 4.0;       // raw policy torque is clipped to [-action_max, action_max]
  double obs_vel_scale = 8.0;    // angular velocity normalisation in the observation
  // start angle is hanging + U(-range, range); the default leaves out the
  // upright window so balancing always has to be entered actively
  double init_angle_range = M_PI - 0.5;
  double init_vel_range = 1.0;  // start velocity is U(-range, range)
  double reward_constant = 0.0;
  double reward_peak_weight = 0.9;
  double reward_dense_weight = 0.05;
  double reward_vel_weight = 1.0;  // attenuates the upright peak while moving
  double upright_angle = 0.25;   // |angle| below this counts as upright for success

  static PendulumParams from_json(const nlohmann::json& cfg);
};

/// Torque-limited rigid rod pivoting about one end. The task is to swing up
/// from hanging and balance upright. Angle 0 is upright; the state wraps to
/// (-pi, pi]. Semi-implicit Euler integration over `substeps` per control
/// step.
class PendulumEnv final : public Environment {
 public:
  PendulumEnv(const PendulumParams& params, TaskMode mode);

  std::string name() const override { return "pendulum"; }
  int observation_dim() const override { return 4; }
  int action_dim() const override { return 1; }
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
  void set_state(double angle, double ang_vel);
  double angle() const { return angle_; }
  double ang_vel() const { return ang_vel_; }
  double total_energy() const;

  const PendulumParams& params() const { return params_; }

 private:
  double reward_for(double angle, double ang_vel) const;

  PendulumParams params_;
  TaskMode mode_;
  Rng rng_;
  double angle_ = 0.0;
  double ang_vel_ = 0.0;
  double torque_prev_ = 0.0;
  int steps_taken_ = 0;
  bool timed_out_ = false;
};

/// Registry of constraint functions over pendulum transitions:
///   violations: torque_limit(limit), velocity_limit(limit),
///               action_rate_limit(limit), action_rate_spike(limit),
///               upright_tracking(epsilon), upright_overspeed(angle, limit)
///   gates: (none)
const ConstraintRegistry& pendulum_registry();

/// Default constraint declarations for the pendulum task in each mode, in
/// the form consumed by the experiment config ("constraints" section).
nlohmann::json pendulum_default_constraints(TaskMode mode);

}  // namespace catrl::envs
