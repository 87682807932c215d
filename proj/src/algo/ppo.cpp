#include "catrl/algo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "catrl/nn/gaussian.hpp"

namespace catrl::algo {

double adapt_learning_rate(double lr, double kl, double kl_threshold, double lr_min,
                           double lr_max) {
  if (kl > 2.0 * kl_threshold) {
    return std::max(lr / 1.5, lr_min);
  }
  if (kl < 0.5 * kl_threshold) {
    return std::min(lr * 1.5, lr_max);
  }
  return lr;
}

PpoUpdater::PpoUpdater(const PpoHyper& hyper, Eigen::Index param_count,
                       std::uint64_t run_seed)
    : hyper_(hyper),
      adam_(nn::make_adam(param_count, hyper.learning_rate)),
      rng_(make_rng(run_seed, kShuffleStream)) {}

UpdateStats PpoUpdater::update(nn::PolicyValueNet& net, const RolloutBatch& batch,
                               const GaeResult& gae) {
  const int total = batch.horizon * batch.num_envs;
  const int act_dim = net.act_dim();

  // flatten advantages/targets to the sample order of batch.obs
  VectorXd advantages(total);
  VectorXd targets(total);
  for (int t = 0; t < batch.horizon; ++t) {
    for (int n = 0; n < batch.num_envs; ++n) {
      advantages[batch.flat_index(t, n)] = gae.advantages(t, n);
      targets[batch.flat_index(t, n)] = gae.returns(t, n);
    }
  }
  const double adv_mean = advantages.mean();
  const double adv_std =
      std::sqrt((advantages.array() - adv_mean).square().sum() / total);
  advantages = (advantages.array() - adv_mean) / (adv_std + 1e-8);

  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);

  UpdateStats stats;
  double kl_sum = 0.0, loss_actor_sum = 0.0, loss_critic_sum = 0.0;
  int minibatches = 0;

  for (int pass = 0; pass < hyper_.mini_epochs; ++pass) {
    std::shuffle(order.begin(), order.end(), rng_);

    for (int start = 0; start < total; start += hyper_.minibatch_size) {
      const int size = std::min(hyper_.minibatch_size, total - start);

      MatrixXd obs_mb(batch.obs.rows(), size);
      MatrixXd act_mb(act_dim, size);
      MatrixXd old_mean_mb(act_dim, size);
      VectorXd old_logp_mb(size);
      VectorXd adv_mb(size);
      VectorXd target_mb(size);
      for (int j = 0; j < size; ++j) {
        const int idx = order[static_cast<std::size_t>(start + j)];
        obs_mb.col(j) = batch.obs.col(idx);
        act_mb.col(j) = batch.actions.col(idx);
        old_mean_mb.col(j) = batch.old_means.col(idx);
        old_logp_mb[j] = batch.old_log_probs[idx];
        adv_mb[j] = advantages[idx];
        target_mb[j] = targets[idx];
      }

      nn::ForwardCache actor_cache, critic_cache;
      const MatrixXd means = forward(net.actor, obs_mb, &actor_cache);
      const VectorXd vals =
          forward(net.critic, obs_mb, &critic_cache).row(0).transpose();

      const VectorXd new_logp = nn::gaussian_log_prob_batch(means, net.log_std, act_mb);
      const Eigen::ArrayXd ratio = (new_logp - old_logp_mb).array().exp();
      const Eigen::ArrayXd clipped =
          ratio.min(1.0 + hyper_.clip).max(1.0 - hyper_.clip);
      const Eigen::ArrayXd surr1 = ratio * adv_mb.array();
      const Eigen::ArrayXd surr2 = clipped * adv_mb.array();
      const double loss_actor = -surr1.min(surr2).mean();

      // d loss / d logp: active only where the unclipped branch is taken
      Eigen::ArrayXd dlogp(size);
      for (int j = 0; j < size; ++j) {
        dlogp[j] = surr1[j] <= surr2[j] ? -adv_mb[j] * ratio[j] / size : 0.0;
      }

      const Eigen::ArrayXd inv_var = (-2.0 * net.log_std.array()).exp();
      MatrixXd mean_grad(act_dim, size);
      VectorXd log_std_grad = VectorXd::Zero(act_dim);
      for (int j = 0; j < size; ++j) {
        const VectorXd diff = act_mb.col(j) - means.col(j);
        mean_grad.col(j) = dlogp[j] * (diff.array() * inv_var).matrix();
        // d logp / d log_std_d = z_d^2 - 1
        log_std_grad.array() +=
            dlogp[j] * (diff.array().square() * inv_var - 1.0);
      }
      log_std_grad.array() -= hyper_.entropy_coef;  // - coef * dH/dlog_std

      const VectorXd verr = vals - target_mb;
      const double loss_critic = 0.5 * verr.squaredNorm() / size;
      MatrixXd value_grad(1, size);
      value_grad.row(0) = (hyper_.critic_coef / size) * verr.transpose();

      const nn::MlpGrads actor_grads = backward(net.actor, actor_cache, mean_grad);
      const nn::MlpGrads critic_grads = backward(net.critic, critic_cache, value_grad);

      VectorXd flat_grads(net.parameter_count());
      const Eigen::Index actor_n = net.actor.parameter_count();
      flat_grads.head(actor_n) = flatten(actor_grads);
      flat_grads.segment(actor_n, act_dim) = log_std_grad;
      flat_grads.tail(net.critic.parameter_count()) = flatten(critic_grads);

      stats.grad_norm = flat_grads.norm();
      if (stats.grad_norm > hyper_.max_grad_norm) {
        flat_grads *= hyper_.max_grad_norm / stats.grad_norm;
      }

      double kl = 0.0;
      for (int j = 0; j < size; ++j) {
        kl += nn::gaussian_kl(old_mean_mb.col(j), batch.old_log_std, means.col(j),
                              net.log_std);
      }
      kl /= size;

      VectorXd flat_params = net.flatten_params();
      adam_step(adam_, flat_params, flat_grads);
      net.load_flat(flat_params);
      net.clamp_log_std();

      adam_.learning_rate =
          adapt_learning_rate(adam_.learning_rate, kl, hyper_.kl_threshold,
                              hyper_.lr_min, hyper_.lr_max);

      kl_sum += kl;
      loss_actor_sum += loss_actor;
      loss_critic_sum += loss_critic;
      ++minibatches;
    }
  }

  stats.kl = kl_sum / minibatches;
  stats.loss_actor = loss_actor_sum / minibatches;
  stats.loss_critic = loss_critic_sum / minibatches;
  stats.entropy = nn::gaussian_entropy(net.log_std);
  stats.learning_rate = adam_.learning_rate;
  return stats;
}

}  // namespace catrl::algo
