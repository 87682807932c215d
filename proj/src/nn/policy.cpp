#include "catrl/nn/policy.hpp"

namespace catrl::nn {

Eigen::Index PolicyValueNet::parameter_count() const {
  return actor.parameter_count() + log_std.size() + critic.parameter_count();
}

VectorXd PolicyValueNet::flatten_params() const {
  VectorXd flat(parameter_count());
  const VectorXd a = flatten(actor);
  const VectorXd c = flatten(critic);
  flat << a, log_std, c;
  return flat;
}

void PolicyValueNet::load_flat(const VectorXd& flat) {
  if (flat.size() != parameter_count()) {
    throw std::logic_error("policy load_flat: size mismatch");
  }
  Eigen::Index at = 0;
  unflatten(flat.segment(at, actor.parameter_count()), actor);
  at += actor.parameter_count();
  log_std = flat.segment(at, log_std.size());
  at += log_std.size();
  unflatten(flat.segment(at, critic.parameter_count()), critic);
}

void PolicyValueNet::clamp_log_std() {
  log_std = log_std.cwiseMax(log_std_min).cwiseMin(log_std_max);
}

PolicyValueNet make_policy_value_net(int obs_dim, int act_dim,
                                     const std::vector<int>& hidden,
                                     Activation activation, Rng& rng) {
  std::vector<int> actor_sizes;
  actor_sizes.push_back(obs_dim);
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  actor_sizes.push_back(act_dim);

  std::vector<int> critic_sizes;
  critic_sizes.push_back(obs_dim);
  critic_sizes.insert(critic_sizes.end(), hidden.begin(), hidden.end());
  critic_sizes.push_back(1);

  PolicyValueNet net;
  net.actor = make_mlp(actor_sizes, activation);
  net.critic = make_mlp(critic_sizes, activation);
  // Small final-layer scale keeps the initial policy near zero mean.
  init_orthogonal(net.actor, rng, 0.01);
  init_orthogonal(net.critic, rng, 1.0);
  net.log_std = VectorXd::Zero(act_dim);
  return net;
}

}  // namespace catrl::nn
