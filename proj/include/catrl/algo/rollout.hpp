#pragma once

#include <vector>

#include "catrl/algo/hyper.hpp"
#include "catrl/constraints/set.hpp"
#include "catrl/envs/env.hpp"
#include "catrl/nn/policy.hpp"

namespace catrl::algo {

/// One epoch of experience from every environment. Flat sample index is
/// t * num_envs + n, matching the column order of `obs` and `actions`.
struct RolloutBatch {
  int horizon = 0;
  int num_envs = 0;
  int num_constraints = 0;

  MatrixXd obs;               // obs_dim x (horizon * num_envs)
  MatrixXd actions;           // act_dim x (horizon * num_envs)
  MatrixXd old_means;         // act_dim x (horizon * num_envs)
  VectorXd old_log_std;       // act_dim, frozen over the whole collection
  VectorXd old_log_probs;     // horizon * num_envs
  MatrixXd values;            // horizon x num_envs
  MatrixXd rewards_raw;       // horizon x num_envs
  MatrixXd positives;         // (horizon * num_envs) x constraints, gated max(0, c)
  MatrixXd timeouts;          // horizon x num_envs, 1 where the episode timed out
  MatrixXd timeout_values;    // horizon x num_envs, critic at the final observation
  VectorXd bootstrap_values;  // num_envs, critic at the post-rollout observation

  // filled in by the trainer's termination pass
  MatrixXd deltas;            // horizon x num_envs
  MatrixXd rewards_shaped;    // horizon x num_envs

  std::vector<double> finished_episode_returns;  // raw returns of episodes that ended

  int flat_index(int t, int n) const { return t * num_envs + n; }
};

/// Steps the environment batch with the sampled policy and records
/// everything the update needs. Owns the action-noise stream and the
/// per-environment episode-return accumulators (episodes span epochs).
class RolloutCollector {
 public:
  RolloutCollector(envs::EnvBatch& batch, const constraints::ConstraintSet& cset,
                   const PpoHyper& hyper, std::uint64_t run_seed);

  RolloutBatch collect(const nn::PolicyValueNet& net);

 private:
  envs::EnvBatch* envs_;
  const constraints::ConstraintSet* cset_;
  const PpoHyper* hyper_;
  Rng rng_;
  VectorXd return_accum_;
  std::vector<constraints::ViolationRecord> scratch_;
};

/// Stream id of the action-noise generator (derived from the run seed).
inline constexpr std::uint64_t kActionStream = 1;

}  // namespace catrl::algo
