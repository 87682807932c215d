#include "catrl/envs/env.hpp"

#include "catrl/envs/pendulum.hpp"
#include "catrl/envs/point_mass.hpp"

namespace catrl::envs {

std::unique_ptr<Environment> make_environment(const nlohmann::json& env_cfg,
                                              TaskMode mode) {
  if (!env_cfg.is_object()) {
    throw ConfigError("config section 'env' must be an object");
  }
  if (!env_cfg.contains("name") || !env_cfg.at("name").is_string()) {
    throw ConfigError("config field 'env.name' must be a string");
  }
  const std::string name = env_cfg.at("name").get<std::string>();
  if (name == "pendulum") {
    return std::make_unique<PendulumEnv>(PendulumParams::from_json(env_cfg), mode);
  }
  if (name == "point_mass") {
    return std::make_unique<PointMassEnv>(PointMassParams::from_json(env_cfg), mode);
  }
  throw ConfigError("unknown environment '" + name +
                    "' (expected 'pendulum' or 'point_mass')");
}

EnvBatch EnvBatch::create(const nlohmann::json& env_cfg, TaskMode mode, int count,
                          std::uint64_t run_seed) {
  if (count < 1) throw ConfigError("environment count must be at least 1");
  EnvBatch batch;
  batch.envs_.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto env = make_environment(env_cfg, mode);
    env->seed(derive_seed(run_seed, kEnvStreamBase + static_cast<std::uint64_t>(i)));
    env->reset();
    batch.envs_.push_back(std::move(env));
  }
  return batch;
}

int EnvBatch::observation_dim() const { return envs_.at(0)->observation_dim(); }

int EnvBatch::action_dim() const { return envs_.at(0)->action_dim(); }

void EnvBatch::reset_all() {
  for (auto& env : envs_) env->reset();
}

MatrixXd EnvBatch::observations() const {
  MatrixXd obs(observation_dim(), size());
  for (int i = 0; i < size(); ++i) obs.col(i) = envs_[static_cast<std::size_t>(i)]->observation();
  return obs;
}

std::vector<Transition> EnvBatch::step(const MatrixXd& actions) {
  if (actions.rows() != action_dim() || actions.cols() != size()) {
    throw std::logic_error("action matrix shape does not match the environment batch");
  }
  std::vector<Transition> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) {
    try {
      out.push_back(envs_[static_cast<std::size_t>(i)]->step(actions.col(i)));
    } catch (const TrainingError& e) {
      throw TrainingError("environment " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace catrl::envs
