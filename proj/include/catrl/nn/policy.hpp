#pragma once

#include <vector>

#include "catrl/nn/mlp.hpp"

namespace catrl::nn {

/// Actor-critic pair: actor MLP producing the Gaussian mean, a
/// state-independent learnable log-std vector, and a scalar-output critic.
/// Parameters flatten to [actor | log_std | critic] for the optimizer.
struct PolicyValueNet {
  MlpParams actor;
  VectorXd log_std;
  MlpParams critic;
  double log_std_min = -5.0;
  double log_std_max = 1.0;

  int obs_dim() const { return actor.input_dim(); }
  int act_dim() const { return actor.output_dim(); }
  Eigen::Index parameter_count() const;

  MatrixXd actor_mean(const MatrixXd& obs, ForwardCache* cache = nullptr) const {
    return forward(actor, obs, cache);
  }
  /// Critic outputs, one value per column of obs.
  VectorXd values(const MatrixXd& obs) const {
    return forward(critic, obs).row(0).transpose();
  }

  VectorXd flatten_params() const;
  void load_flat(const VectorXd& flat);
  /// Projects log_std back into [log_std_min, log_std_max].
  void clamp_log_std();
};

PolicyValueNet make_policy_value_net(int obs_dim, int act_dim,
                                     const std::vector<int>& hidden,
                                     Activation activation, Rng& rng);

}  // namespace catrl::nn
