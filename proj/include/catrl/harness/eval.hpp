#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "catrl/constraints/set.hpp"
#include "catrl/envs/env.hpp"
#include "catrl/nn/policy.hpp"

namespace catrl::harness {

/// Evaluation outcome over a fixed number of episodes under the mean
/// (noise-free) policy, with per-step violation counting.
struct EvalReport {
  int episodes = 0;
  long long steps = 0;
  double mean_return = 0.0;
  double return_std = 0.0;  // NaN when only one episode was run
  double success_rate = 0.0;
  std::vector<double> episode_returns;
  std::vector<int> successes;  // 0/1 per episode
  std::vector<std::string> constraint_ids;
  std::vector<double> violation_fraction;  // per constraint, same order as ids
  std::map<std::string, double> aux_mean;  // env-specific per-step statistics
  std::map<std::string, double> aux_p95;

  double violation_fraction_of(const std::string& id) const;  // throws on unknown id
  nlohmann::json to_json() const;
};

/// Rolls out the mean policy on a freshly seeded environment. If
/// `transition_log_path` is non-empty, writes one CSV row per step with the
/// raw constraint values so the violation fractions can be recounted
/// independently. Throws ConfigError when the network and environment
/// disagree on dimensions.
EvalReport evaluate_policy(const nn::PolicyValueNet& net, const nlohmann::json& env_cfg,
                           envs::TaskMode mode, const constraints::ConstraintSet& cset,
                           int episodes, std::uint64_t run_seed,
                           const std::string& transition_log_path = "");

/// 95th percentile by the nearest-rank rule (used for the aux statistics).
double percentile95(std::vector<double> samples);

/// Stream id of the evaluation environment.
inline constexpr std::uint64_t kEvalStream = 3000;

}  // namespace catrl::harness
