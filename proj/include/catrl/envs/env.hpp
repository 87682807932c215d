#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "catrl/common.hpp"
#include "catrl/envs/types.hpp"

namespace catrl::envs {

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int episode_length() const = 0;

  /// Re-seeds the environment's private random stream. Resetting after the
  /// same seed reproduces the same initial state and command sequence.
  virtual void seed(std::uint64_t stream_seed) = 0;

  /// Samples a fresh episode start from the environment's stream.
  virtual void reset() = 0;

  virtual VectorXd observation() const = 0;

  /// Advances one control step. Throws TrainingError if called after a
  /// timeout without an intervening reset.
  virtual Transition step(const VectorXd& action) = 0;

  virtual const ConstraintRegistry& registry() const = 0;

  /// Task-specific success judgement over one complete episode.
  virtual bool episode_success(const std::vector<Transition>& episode) const = 0;

  /// Appends per-step evaluation statistics (keyed samples) for reporting.
  virtual void eval_stats(const Transition& t,
                          std::map<std::string, std::vector<double>>& out) const = 0;
};

/// Builds an environment from the "env" config section. Recognised names:
/// "pendulum", "point_mass". Throws ConfigError on unknown names or bad
/// parameter values.
std::unique_ptr<Environment> make_environment(const nlohmann::json& env_cfg,
                                              TaskMode mode);

/// A set of independent environment instances stepped in lockstep. Each
/// instance owns a random stream derived from the run seed and its index,
/// so results do not depend on how many instances exist elsewhere.
class EnvBatch {
 public:
  static EnvBatch create(const nlohmann::json& env_cfg, TaskMode mode, int count,
                         std::uint64_t run_seed);

  int size() const { return static_cast<int>(envs_.size()); }
  Environment& env(int i) { return *envs_.at(static_cast<std::size_t>(i)); }
  const Environment& env(int i) const { return *envs_.at(static_cast<std::size_t>(i)); }

  int observation_dim() const;
  int action_dim() const;

  void reset_all();

  /// Current observations, one column per environment.
  MatrixXd observations() const;

  /// Steps every environment with its column of `actions`. A timed-out
  /// environment is left un-reset; the caller decides when to reset it.
  std::vector<Transition> step(const MatrixXd& actions);

 private:
  std::vector<std::unique_ptr<Environment>> envs_;
};

/// Stream-id offset for per-environment seeds, so environment streams never
/// collide with the learner's streams.
inline constexpr std::uint64_t kEnvStreamBase = 1000;

}  // namespace catrl::envs
