#pragma once

#include <functional>
#include <string>
#include <vector>

#include "catrl/algo/ppo.hpp"
#include "catrl/algo/rollout.hpp"
#include "catrl/constraints/termination.hpp"

namespace catrl::algo {

/// How constraint violations end trajectories during training.
///  - Probabilistic: graded termination probabilities from scaled violations
///  - Binary: certain termination on any active violation
///  - None: violations never terminate (reward shaping only, if configured)
enum class TerminationMode { Probabilistic, Binary, None };

TerminationMode termination_mode_from_string(const std::string& name);
std::string to_string(TerminationMode mode);

struct TrainSetup {
  PpoHyper hyper;
  TerminationMode termination = TerminationMode::Probabilistic;
  std::vector<double> penalty_weights;  // per constraint; empty = no penalty term
  std::uint64_t run_seed = 0;
};

/// Everything worth logging about one training epoch.
struct EpochRecord {
  int epoch = 0;
  long long total_steps = 0;
  double mean_reward_raw = 0.0;
  double mean_reward_shaped = 0.0;
  double mean_episode_return = 0.0;  // NaN when no episode finished this epoch
  int episodes_completed = 0;
  double mean_delta = 0.0;
  UpdateStats update;
  std::vector<double> cplus_mean;  // per constraint
  std::vector<double> viol_frac;   // per constraint
  std::vector<double> c_max;       // per constraint
  std::vector<double> p_max;       // per constraint
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Orchestrates the training loop: collect a batch, refresh the violation
/// normaliser, turn violations into termination probabilities, shape the
/// rewards by survival, then run the PPO update.
class Trainer {
 public:
  Trainer(envs::EnvBatch& batch, const constraints::ConstraintSet& cset,
          const TrainSetup& setup);

  /// Runs setup.hyper.epochs epochs, invoking `on_epoch` after each.
  void run(const EpochCallback& on_epoch);

  nn::PolicyValueNet& net() { return net_; }
  const nn::PolicyValueNet& net() const { return net_; }
  constraints::TerminationState& termination_state() { return term_state_; }
  PpoUpdater& updater() { return updater_; }

 private:
  envs::EnvBatch* envs_;
  const constraints::ConstraintSet* cset_;
  TrainSetup setup_;
  nn::PolicyValueNet net_;
  RolloutCollector collector_;
  PpoUpdater updater_;
  constraints::TerminationState term_state_;
  long long total_steps_ = 0;
};

/// Stream id of the network initialisation generator.
inline constexpr std::uint64_t kInitStream = 0;

}  // namespace catrl::algo
