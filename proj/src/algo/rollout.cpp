#include "catrl/algo/rollout.hpp"

#include <random>

#include "catrl/nn/gaussian.hpp"

namespace catrl::algo {

RolloutCollector::RolloutCollector(envs::EnvBatch& batch,
                                   const constraints::ConstraintSet& cset,
                                   const PpoHyper& hyper, std::uint64_t run_seed)
    : envs_(&batch),
      cset_(&cset),
      hyper_(&hyper),
      rng_(make_rng(run_seed, kActionStream)),
      return_accum_(VectorXd::Zero(batch.size())) {}

RolloutBatch RolloutCollector::collect(const nn::PolicyValueNet& net) {
  const int T = hyper_->horizon;
  const int N = envs_->size();
  const int obs_dim = envs_->observation_dim();
  const int act_dim = envs_->action_dim();
  const int K = cset_->size();

  RolloutBatch b;
  b.horizon = T;
  b.num_envs = N;
  b.num_constraints = K;
  b.obs.resize(obs_dim, T * N);
  b.actions.resize(act_dim, T * N);
  b.old_means.resize(act_dim, T * N);
  b.old_log_std = net.log_std;
  b.old_log_probs.resize(T * N);
  b.values.resize(T, N);
  b.rewards_raw.resize(T, N);
  b.positives.resize(T * N, K);
  b.timeouts.setZero(T, N);
  b.timeout_values.setZero(T, N);

  const VectorXd stds = net.log_std.array().exp();
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  for (int t = 0; t < T; ++t) {
    const MatrixXd obs_t = envs_->observations();
    const MatrixXd means = net.actor_mean(obs_t);
    b.values.row(t) = net.values(obs_t).transpose();

    MatrixXd actions(act_dim, N);
    for (int n = 0; n < N; ++n) {
      for (int d = 0; d < act_dim; ++d) {
        actions(d, n) = means(d, n) + stds(d) * unit_normal(rng_);
      }
    }

    const auto transitions = envs_->step(actions);

    b.obs.middleCols(t * N, N) = obs_t;
    b.actions.middleCols(t * N, N) = actions;
    b.old_means.middleCols(t * N, N) = means;
    b.old_log_probs.segment(t * N, N) =
        nn::gaussian_log_prob_batch(means, net.log_std, actions);

    for (int n = 0; n < N; ++n) {
      const auto& tr = transitions[static_cast<std::size_t>(n)];
      b.rewards_raw(t, n) = tr.reward;
      return_accum_[n] += tr.reward;

      cset_->evaluate_into(tr, scratch_);
      for (int k = 0; k < K; ++k) {
        b.positives(b.flat_index(t, n), k) = scratch_[static_cast<std::size_t>(k)].positive;
      }

      if (tr.timeout) {
        b.timeouts(t, n) = 1.0;
        b.timeout_values(t, n) = net.values(tr.obs_after)(0);
        b.finished_episode_returns.push_back(return_accum_[n]);
        return_accum_[n] = 0.0;
        envs_->env(n).reset();
      }
    }
  }

  b.bootstrap_values = net.values(envs_->observations());
  return b;
}

}  // namespace catrl::algo
