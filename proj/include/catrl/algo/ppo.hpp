#pragma once

#include "catrl/algo/gae.hpp"
#include "catrl/algo/hyper.hpp"
#include "catrl/algo/rollout.hpp"
#include "catrl/nn/adam.hpp"
#include "catrl/nn/policy.hpp"

namespace catrl::algo {

struct UpdateStats {
  double kl = 0.0;           // mean over all minibatches of the update
  double loss_actor = 0.0;   // mean clipped-surrogate loss
  double loss_critic = 0.0;  // mean 0.5 * squared value error (unweighted)
  double entropy = 0.0;      // policy entropy after the update
  double learning_rate = 0.0;
  double grad_norm = 0.0;    // pre-clip norm of the last minibatch gradient
};

/// Clipped-surrogate PPO update over a collected batch, with manually
/// derived gradients and a KL-adaptive learning rate. Owns the optimizer
/// state and the minibatch shuffling stream.
class PpoUpdater {
 public:
  PpoUpdater(const PpoHyper& hyper, Eigen::Index param_count, std::uint64_t run_seed);

  /// Runs mini_epochs passes of minibatch updates. Advantages are
  /// normalised once over the whole batch. The learning rate is adapted
  /// after every minibatch from the closed-form KL between the collection
  /// policy and the current one.
  UpdateStats update(nn::PolicyValueNet& net, const RolloutBatch& batch,
                     const GaeResult& gae);

  double learning_rate() const { return adam_.learning_rate; }
  nn::AdamState& adam() { return adam_; }
  const nn::AdamState& adam() const { return adam_; }

 private:
  PpoHyper hyper_;
  nn::AdamState adam_;
  Rng rng_;
};

/// KL-adaptive learning rate rule: divide by 1.5 when the measured KL is
/// above twice the threshold, multiply by 1.5 when it is below half of it,
/// clamped to [lr_min, lr_max].
double adapt_learning_rate(double lr, double kl, double kl_threshold, double lr_min,
                           double lr_max);

/// Stream id of the minibatch shuffle generator (derived from the run seed).
inline constexpr std::uint64_t kShuffleStream = 2;

}  // namespace catrl::algo
