#include "catrl/algo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catrl::algo {

TerminationMode termination_mode_from_string(const std::string& name) {
  if (name == "probabilistic") return TerminationMode::Probabilistic;
  if (name == "binary") return TerminationMode::Binary;
  if (name == "none") return TerminationMode::None;
  throw ConfigError("unknown termination mode '" + name +
                    "' (expected 'probabilistic', 'binary' or 'none')");
}

std::string to_string(TerminationMode mode) {
  switch (mode) {
    case TerminationMode::Probabilistic: return "probabilistic";
    case TerminationMode::Binary: return "binary";
    case TerminationMode::None: return "none";
  }
  return "unknown";
}

namespace {

nn::PolicyValueNet build_net(const envs::EnvBatch& batch, const TrainSetup& setup) {
  Rng rng = make_rng(setup.run_seed, kInitStream);
  return nn::make_policy_value_net(batch.observation_dim(), batch.action_dim(),
                                   setup.hyper.hidden, setup.hyper.activation, rng);
}

}  // namespace

Trainer::Trainer(envs::EnvBatch& batch, const constraints::ConstraintSet& cset,
                 const TrainSetup& setup)
    : envs_(&batch),
      cset_(&cset),
      setup_(setup),
      net_(build_net(batch, setup)),
      collector_(batch, cset, setup_.hyper, setup.run_seed),
      updater_(setup_.hyper, net_.parameter_count(), setup.run_seed),
      term_state_(constraints::TerminationState::create(cset.size(), setup.hyper.tau_c,
                                                        setup.hyper.c_max_floor)) {
  if (!setup_.penalty_weights.empty() &&
      static_cast<int>(setup_.penalty_weights.size()) != cset.size()) {
    throw ConfigError("penalty weight count (" +
                      std::to_string(setup_.penalty_weights.size()) +
                      ") does not match constraint count (" +
                      std::to_string(cset.size()) + ")");
  }
}

void Trainer::run(const EpochCallback& on_epoch) {
  const int T = setup_.hyper.horizon;
  const int N = envs_->size();
  const int K = cset_->size();
  const int E = setup_.hyper.epochs;

  for (int epoch = 0; epoch < E; ++epoch) {
    RolloutBatch batch = collector_.collect(net_);

    if (setup_.termination != TerminationMode::None && K > 0) {
      constraints::update_c_max(term_state_, batch.positives);
    }
    const std::vector<double> p_maxes = cset_->p_maxes(epoch, E);

    batch.deltas.setZero(T, N);
    if (K > 0 && setup_.termination != TerminationMode::None) {
      for (int t = 0; t < T; ++t) {
        for (int n = 0; n < N; ++n) {
          const auto row = batch.positives.row(batch.flat_index(t, n));
          if (setup_.termination == TerminationMode::Probabilistic) {
            batch.deltas(t, n) = constraints::termination_probability(
                term_state_, row.transpose(), p_maxes);
          } else {
            batch.deltas(t, n) = (row.array() > 0.0).any() ? 1.0 : 0.0;
          }
        }
      }
    }

    batch.rewards_shaped = batch.rewards_raw;
    if (!setup_.penalty_weights.empty()) {
      for (int t = 0; t < T; ++t) {
        for (int n = 0; n < N; ++n) {
          double penalty = 0.0;
          for (int k = 0; k < K; ++k) {
            penalty += setup_.penalty_weights[static_cast<std::size_t>(k)] *
                       batch.positives(batch.flat_index(t, n), k);
          }
          // Clamp at zero so penalised rewards keep the sign assumption the
          // termination shaping relies on (terminated futures forfeit value).
          batch.rewards_shaped(t, n) =
              std::max(0.0, batch.rewards_shaped(t, n) - penalty);
        }
      }
    }
    batch.rewards_shaped.array() *= (1.0 - batch.deltas.array());

    const GaeResult gae =
        compute_gae(batch.rewards_shaped, batch.values, batch.deltas, batch.timeouts,
                    batch.timeout_values, batch.bootstrap_values, setup_.hyper.gamma,
                    setup_.hyper.lam);

    EpochRecord rec;
    rec.update = updater_.update(net_, batch, gae);
    total_steps_ += static_cast<long long>(T) * N;
    term_state_.epoch = epoch + 1;

    rec.epoch = epoch;
    rec.total_steps = total_steps_;
    rec.mean_reward_raw = batch.rewards_raw.mean();
    rec.mean_reward_shaped = batch.rewards_shaped.mean();
    rec.episodes_completed = static_cast<int>(batch.finished_episode_returns.size());
    if (batch.finished_episode_returns.empty()) {
      rec.mean_episode_return = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double r : batch.finished_episode_returns) sum += r;
      rec.mean_episode_return = sum / rec.episodes_completed;
    }
    rec.mean_delta = batch.deltas.mean();
    rec.cplus_mean.resize(static_cast<std::size_t>(K));
    rec.viol_frac.resize(static_cast<std::size_t>(K));
    rec.c_max.resize(static_cast<std::size_t>(K));
    rec.p_max = p_maxes;
    for (int k = 0; k < K; ++k) {
      rec.cplus_mean[static_cast<std::size_t>(k)] = batch.positives.col(k).mean();
      rec.viol_frac[static_cast<std::size_t>(k)] =
          (batch.positives.col(k).array() > 0.0).cast<double>().mean();
      rec.c_max[static_cast<std::size_t>(k)] = term_state_.c_max[k];
    }

    if (on_epoch) on_epoch(rec);
  }
}

}  // namespace catrl::algo
