#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "catrl/algo/gae.hpp"
#include "catrl/algo/ppo.hpp"
#include "catrl/algo/rollout.hpp"
#include "catrl/algo/trainer.hpp"
#include "catrl/envs/pendulum.hpp"
#include "catrl/nn/gaussian.hpp"

using namespace catrl;
using namespace catrl::algo;

namespace {

// Textbook GAE with boolean dones and time-limit bootstrapping, written
// directly from the recursion as an independent reference.
MatrixXd boolean_gae(const MatrixXd& r, const MatrixXd& v, const MatrixXd& done,
                     const MatrixXd& timeouts, const MatrixXd& timeout_values,
                     const VectorXd& bootstrap, double gamma, double lam) {
  const int T = static_cast<int>(r.rows());
  const int N = static_cast<int>(r.cols());
  MatrixXd adv(T, N);
  for (int n = 0; n < N; ++n) {
    double carry = 0.0;
    for (int t = T - 1; t >= 0; --t) {
      double next_v;
      if (timeouts(t, n) != 0.0) {
        next_v = timeout_values(t, n);
      } else if (t == T - 1) {
        next_v = bootstrap[n];
      } else {
        next_v = v(t + 1, n);
      }
      const double nonterminal = 1.0 - done(t, n);
      const double e = r(t, n) + gamma * nonterminal * next_v - v(t, n);
      const double carried = timeouts(t, n) != 0.0 ? 0.0 : carry;
      carry = e + gamma * lam * nonterminal * carried;
      adv(t, n) = carry;
    }
  }
  return adv;
}

// Discounted product-form return: sum_t r_t * prod_{j<=t} gamma*(1-delta_j).
double product_form_return(const VectorXd& raw_rewards, const VectorXd& deltas,
                           double gamma) {
  double total = 0.0;
  double survival = 1.0;
  for (Eigen::Index t = 0; t < raw_rewards.size(); ++t) {
    survival *= gamma * (1.0 - deltas[t]);
    total += raw_rewards[t] * survival;
  }
  return total;
}

struct SyntheticUpdate {
  nn::PolicyValueNet net;
  RolloutBatch batch;
  GaeResult gae;
  PpoHyper hyper;
};

// Two samples sharing one observation, actions placed symmetrically around
// the current policy mean, opposite advantages.
SyntheticUpdate symmetric_pair(double adv_hi, double adv_lo) {
  Rng rng = make_rng(77, 0);
  SyntheticUpdate s;
  s.net = nn::make_policy_value_net(3, 1, {8}, nn::Activation::Elu, rng);

  s.hyper.horizon = 1;
  s.hyper.num_envs = 2;
  s.hyper.minibatch_size = 2;
  s.hyper.mini_epochs = 1;
  s.hyper.validate();

  VectorXd obs(3);
  obs << 0.4, -0.2, 0.9;
  const double mean = nn::forward1(s.net.actor, obs)[0];

  auto& b = s.batch;
  b.horizon = 1;
  b.num_envs = 2;
  b.num_constraints = 0;
  b.obs.resize(3, 2);
  b.obs.col(0) = obs;
  b.obs.col(1) = obs;
  b.actions.resize(1, 2);
  b.actions(0, 0) = mean + 0.5;
  b.actions(0, 1) = mean - 0.5;
  b.old_means.resize(1, 2);
  b.old_means.setConstant(mean);
  b.old_log_std = s.net.log_std;
  b.old_log_probs.resize(2);
  for (int j = 0; j < 2; ++j) {
    b.old_log_probs[j] = nn::gaussian_log_prob(b.old_means.col(j), b.old_log_std,
                                               b.actions.col(j));
  }
  b.values = MatrixXd::Zero(1, 2);
  b.rewards_raw = MatrixXd::Zero(1, 2);
  b.positives.resize(2, 0);
  b.timeouts = MatrixXd::Zero(1, 2);
  b.timeout_values = MatrixXd::Zero(1, 2);
  b.bootstrap_values = VectorXd::Zero(2);

  s.gae.advantages.resize(1, 2);
  s.gae.advantages << adv_hi, adv_lo;
  s.gae.returns = MatrixXd::Constant(1, 2, 0.25);
  return s;
}

}  // namespace

TEST_CASE("hyper: documented defaults") {
  PpoHyper h;
  CHECK(h.horizon == 24);
  CHECK(h.num_envs == 256);
  CHECK(h.epochs == 300);
  CHECK(h.mini_epochs == 5);
  CHECK(h.minibatch_size == 1536);
  CHECK(h.gamma == 0.99);
  CHECK(h.lam == 0.95);
  CHECK(h.clip == 0.2);
  CHECK(h.entropy_coef == 1e-3);
  CHECK(h.critic_coef == 2.0);
  CHECK(h.learning_rate == 3e-4);
  CHECK(h.kl_threshold == 8e-3);
  CHECK(h.max_grad_norm == 1.0);
  CHECK(h.hidden == std::vector<int>{64, 64});
  CHECK(h.activation == nn::Activation::Elu);
  CHECK(h.batch_size() == 24 * 256);
}

TEST_CASE("hyper: parsing overrides and field-path errors") {
  nlohmann::json cfg = {{"gamma", 0.95}, {"hidden", {32, 32, 16}}, {"epochs", 10}};
  const PpoHyper h = PpoHyper::from_json(cfg);
  CHECK(h.gamma == 0.95);
  CHECK(h.hidden == std::vector<int>{32, 32, 16});
  CHECK(h.epochs == 10);
  CHECK(h.lam == 0.95);  // untouched default

  CHECK_THROWS_WITH_AS(PpoHyper::from_json({{"gamma", "high"}}),
                       doctest::Contains("algo.gamma"), ConfigError);
  CHECK_THROWS_AS(PpoHyper::from_json({{"unknown_knob", 1}}), ConfigError);

  PpoHyper bad;
  bad.minibatch_size = bad.batch_size() + 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  PpoHyper bad2;
  bad2.lam = 1.5;
  CHECK_THROWS_AS(bad2.validate(), ConfigError);
}

TEST_CASE("adaptive learning rate rule") {
  const double thr = 8e-3;
  // dead zone
  CHECK(adapt_learning_rate(3e-4, thr, thr, 1e-6, 1e-2) == 3e-4);
  CHECK(adapt_learning_rate(3e-4, 2.0 * thr, thr, 1e-6, 1e-2) == 3e-4);
  CHECK(adapt_learning_rate(3e-4, 0.5 * thr, thr, 1e-6, 1e-2) == 3e-4);
  // shrink on large KL
  CHECK(adapt_learning_rate(3e-4, 10.0 * thr, thr, 1e-6, 1e-2) ==
        doctest::Approx(2e-4).epsilon(1e-12));
  // grow on small KL
  CHECK(adapt_learning_rate(2e-4, 0.1 * thr, thr, 1e-6, 1e-2) ==
        doctest::Approx(3e-4).epsilon(1e-12));
  // saturation at both ends
  double lr = 3e-4;
  for (int i = 0; i < 60; ++i) lr = adapt_learning_rate(lr, 0.0, thr, 1e-6, 1e-2);
  CHECK(lr == 1e-2);
  for (int i = 0; i < 80; ++i) lr = adapt_learning_rate(lr, 1.0, thr, 1e-6, 1e-2);
  CHECK(lr == 1e-6);
}

TEST_CASE("gae: three-step hand example with a half termination") {
  MatrixXd rewards(3, 1), values = MatrixXd::Zero(3, 1), deltas(3, 1);
  MatrixXd timeouts = MatrixXd::Zero(3, 1), timeout_values = MatrixXd::Zero(3, 1);
  deltas << 0.5, 0.0, 0.0;
  // raw rewards are all 1; the learner sees them scaled by survival
  rewards << 0.5, 1.0, 1.0;
  const VectorXd bootstrap = VectorXd::Zero(1);

  const GaeResult g =
      compute_gae(rewards, values, deltas, timeouts, timeout_values, bootstrap, 0.99, 1.0);

  CHECK(g.advantages(2, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.advantages(1, 0) == doctest::Approx(1.99).epsilon(1e-12));
  // A_0 = 0.5 + 0.99 * 0.5 * 1.99
  CHECK(g.advantages(0, 0) == doctest::Approx(1.48505).epsilon(1e-12));

  // the recursive return at t=0 carries one less discount factor than the
  // product-form objective
  VectorXd raw = VectorXd::Ones(3);
  VectorXd d(3);
  d << 0.5, 0.0, 0.0;
  const double product = product_form_return(raw, d, 0.99);
  CHECK(product == doctest::Approx(1.4701995).epsilon(1e-12));
  CHECK(0.99 * g.returns(0, 0) == doctest::Approx(product).epsilon(1e-10));
}

TEST_CASE("gae: boolean deltas reduce to the reference implementation") {
  Rng rng = make_rng(101, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int T = 1 + static_cast<int>(unit(rng) * 31);
    const int N = 1 + static_cast<int>(unit(rng) * 3);
    MatrixXd r(T, N), v(T, N), d(T, N);
    MatrixXd timeouts = MatrixXd::Zero(T, N), tv = MatrixXd::Zero(T, N);
    VectorXd boot(N);
    for (int n = 0; n < N; ++n) {
      boot[n] = normal(rng);
      for (int t = 0; t < T; ++t) {
        r(t, n) = normal(rng);
        v(t, n) = normal(rng);
        d(t, n) = unit(rng) < 0.3 ? 1.0 : 0.0;
        if (unit(rng) < 0.1) {
          timeouts(t, n) = 1.0;
          tv(t, n) = normal(rng);
        }
      }
    }
    const double gamma = 0.9 + 0.1 * unit(rng);
    const double lam = unit(rng);
    const GaeResult got = compute_gae(r, v, d, timeouts, tv, boot, gamma, lam);
    const MatrixXd want = boolean_gae(r, v, d, timeouts, tv, boot, gamma, lam);
    CHECK((got.advantages - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((got.returns - (want + v)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gae: product-form objective consistency for arbitrary deltas") {
  Rng rng = make_rng(102, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int T = 1 + static_cast<int>(unit(rng) * 31);
    VectorXd raw(T), d(T);
    MatrixXd scaled(T, 1);
    for (int t = 0; t < T; ++t) {
      raw[t] = unit(rng) * 2.0;
      d[t] = unit(rng);
      scaled(t, 0) = (1.0 - d[t]) * raw[t];
    }
    const MatrixXd zeros = MatrixXd::Zero(T, 1);
    MatrixXd dm(T, 1);
    dm.col(0) = d;
    const GaeResult g =
        compute_gae(scaled, zeros, dm, zeros, zeros, VectorXd::Zero(1), 0.99, 1.0);
    const double product = product_form_return(raw, d, 0.99);
    CHECK(std::abs(0.99 * g.returns(0, 0) - product) < 1e-10);
  }
}

TEST_CASE("gae: a certain termination annihilates bootstrap and carry") {
  Rng rng = make_rng(103, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int T = 6;
  MatrixXd r(T, 1), v(T, 1), d = MatrixXd::Zero(T, 1);
  MatrixXd timeouts = MatrixXd::Zero(T, 1), tv = MatrixXd::Zero(T, 1);
  VectorXd boot(1);
  boot << normal(rng);
  for (int t = 0; t < T; ++t) {
    r(t, 0) = std::abs(normal(rng));
    v(t, 0) = normal(rng);
  }
  const int cut = 3;
  d(cut, 0) = 1.0;
  r(cut, 0) = 0.0;  // scaled reward (1 - delta) * raw is zero

  const GaeResult g = compute_gae(r, v, d, timeouts, tv, boot, 0.99, 0.95);
  CHECK(g.advantages(cut, 0) == doctest::Approx(-v(cut, 0)).epsilon(1e-12));

  // nothing after the cut can leak into earlier steps
  MatrixXd r2 = r, v2 = v;
  r2(cut + 1, 0) += 100.0;
  v2(cut + 1, 0) -= 50.0;
  const GaeResult g2 = compute_gae(r2, v2, d, timeouts, tv, boot, 0.99, 0.95);
  for (int t = 0; t <= cut; ++t) {
    CHECK(g.advantages(t, 0) == doctest::Approx(g2.advantages(t, 0)).epsilon(1e-12));
  }
}

TEST_CASE("gae: timeouts bootstrap the terminal observation and cut the carry") {
  MatrixXd r(2, 1), v(2, 1), d = MatrixXd::Zero(2, 1);
  MatrixXd timeouts = MatrixXd::Zero(2, 1), tv = MatrixXd::Zero(2, 1);
  r << 1.0, 2.0;
  v << 0.5, 0.25;
  timeouts(0, 0) = 1.0;
  tv(0, 0) = 3.0;
  VectorXd boot(1);
  boot << 4.0;

  const GaeResult g = compute_gae(r, v, d, timeouts, tv, boot, 0.9, 0.8);
  // row 1 starts a fresh episode and bootstraps the rollout tail
  const double a1 = 2.0 + 0.9 * 4.0 - 0.25;
  CHECK(g.advantages(1, 0) == doctest::Approx(a1).epsilon(1e-12));
  // row 0 bootstraps the stored terminal value and ignores row 1 entirely
  CHECK(g.advantages(0, 0) == doctest::Approx(1.0 + 0.9 * 3.0 - 0.5).epsilon(1e-12));

  // a timeout on the last row overrides the rollout bootstrap
  MatrixXd timeouts2 = MatrixXd::Zero(2, 1), tv2 = MatrixXd::Zero(2, 1);
  timeouts2(1, 0) = 1.0;
  tv2(1, 0) = -1.0;
  const GaeResult g2 = compute_gae(r, v, d, timeouts2, tv2, boot, 0.9, 0.8);
  CHECK(g2.advantages(1, 0) == doctest::Approx(2.0 + 0.9 * -1.0 - 0.25).epsilon(1e-12));
}

TEST_CASE("gae: raising any single delta never raises the return target") {
  Rng rng = make_rng(104, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int T = 2 + static_cast<int>(unit(rng) * 14);
    VectorXd raw(T), d(T);
    MatrixXd v(T, 1), timeouts = MatrixXd::Zero(T, 1), tv = MatrixXd::Zero(T, 1);
    for (int t = 0; t < T; ++t) {
      raw[t] = unit(rng) * 2.0;
      d[t] = unit(rng);
      v(t, 0) = unit(rng);  // nonnegative values, matching positive rewards
      if (unit(rng) < 0.1) {
        timeouts(t, 0) = 1.0;
        tv(t, 0) = unit(rng);
      }
    }
    VectorXd boot(1);
    boot << unit(rng);
    const double gamma = 0.95, lam = unit(rng);

    auto run = [&](const VectorXd& deltas) {
      MatrixXd scaled(T, 1), dm(T, 1);
      for (int t = 0; t < T; ++t) {
        scaled(t, 0) = (1.0 - deltas[t]) * raw[t];
        dm(t, 0) = deltas[t];
      }
      return compute_gae(scaled, v, dm, timeouts, tv, boot, gamma, lam).returns(0, 0);
    };

    const double base = run(d);
    VectorXd bumped = d;
    const int k = static_cast<int>(unit(rng) * T);
    bumped[k] = d[k] + (1.0 - d[k]) * unit(rng);
    CHECK(run(bumped) <= base + 1e-12);
  }
}

TEST_CASE("gae: rejects malformed inputs") {
  const MatrixXd ones = MatrixXd::Ones(3, 2);
  const VectorXd boot = VectorXd::Zero(2);
  CHECK_THROWS_AS(compute_gae(ones, MatrixXd::Ones(2, 2), ones, ones,
                              MatrixXd::Zero(3, 2), boot, 0.99, 0.95),
                  std::logic_error);
  MatrixXd bad_delta = MatrixXd::Zero(3, 2);
  bad_delta(1, 1) = 1.5;
  CHECK_THROWS_AS(compute_gae(ones, ones, bad_delta, MatrixXd::Zero(3, 2),
                              MatrixXd::Zero(3, 2), boot, 0.99, 0.95),
                  std::logic_error);
}

TEST_CASE("rollout: stored policy terms are self-consistent") {
  nlohmann::json env_cfg = {{"name", "pendulum"}, {"episode_length", 8}};
  auto venvs = envs::EnvBatch::create(env_cfg, envs::TaskMode::Reward, 4, 2024);

  nlohmann::json section = {
      {"spin", {{"kind", "soft"}, {"fn", "velocity_limit"}, {"params", {{"limit", 0.0}}}}}};
  const auto cset = constraints::ConstraintSet::bind(
      constraints::parse_constraint_decls(section), venvs.env(0).registry());

  PpoHyper hyper;
  hyper.horizon = 16;
  hyper.num_envs = 4;
  hyper.minibatch_size = 64;
  Rng rng = make_rng(9, 0);
  auto net = nn::make_policy_value_net(4, 1, {16, 16}, nn::Activation::Elu, rng);

  RolloutCollector collector(venvs, cset, hyper, 2024);
  const RolloutBatch b = collector.collect(net);

  CHECK(b.horizon == 16);
  CHECK(b.num_envs == 4);
  CHECK(b.num_constraints == 1);
  CHECK(b.old_log_std == net.log_std);

  // log-probabilities recompute exactly from the stored pieces
  for (int i = 0; i < 64; ++i) {
    CHECK(b.old_log_probs[i] ==
          doctest::Approx(nn::gaussian_log_prob(b.old_means.col(i), b.old_log_std,
                                                b.actions.col(i)))
              .epsilon(1e-12));
  }

  // value rows recompute from the stored observations
  for (int t = 0; t < 16; ++t) {
    for (int n = 0; n < 4; ++n) {
      const VectorXd obs = b.obs.col(b.flat_index(t, n));
      CHECK(b.values(t, n) == doctest::Approx(net.values(obs)(0)).epsilon(1e-12));
    }
  }

  // episodes are 8 steps long, so rows 7 and 15 time out for every env
  for (int n = 0; n < 4; ++n) {
    for (int t = 0; t < 16; ++t) {
      CHECK(b.timeouts(t, n) == ((t == 7 || t == 15) ? 1.0 : 0.0));
    }
  }
  CHECK(b.finished_episode_returns.size() == 8);
  for (int n = 0; n < 4; ++n) {
    double first = 0.0;
    for (int t = 0; t < 8; ++t) first += b.rewards_raw(t, n);
    CHECK(b.finished_episode_returns[static_cast<std::size_t>(n)] ==
          doctest::Approx(first).epsilon(1e-12));
  }

  // the violation column recomputes from the next row's observation
  // (velocity_limit with limit 0 records |angular velocity| after the step,
  // and the observation scales it by 8)
  for (int t = 0; t < 15; ++t) {
    for (int n = 0; n < 4; ++n) {
      if (b.timeouts(t, n) != 0.0) continue;  // next row is a fresh episode
      const double vel = b.obs(2, b.flat_index(t + 1, n)) * 8.0;
      CHECK(b.positives(b.flat_index(t, n), 0) ==
            doctest::Approx(std::abs(vel)).epsilon(1e-9));
    }
  }

  CHECK(b.bootstrap_values.size() == 4);
  CHECK(b.bootstrap_values.allFinite());
}

TEST_CASE("ppo update: flat advantages leave the actor body untouched") {
  SyntheticUpdate s = symmetric_pair(0.7, 0.7);
  PpoUpdater updater(s.hyper, s.net.parameter_count(), 1);

  const VectorXd actor_before = nn::flatten(s.net.actor);
  const VectorXd log_std_before = s.net.log_std;
  const VectorXd critic_before = nn::flatten(s.net.critic);

  const UpdateStats stats = updater.update(s.net, s.batch, s.gae);

  CHECK(nn::flatten(s.net.actor) == actor_before);     // zero surrogate gradient
  CHECK(s.net.log_std != log_std_before);              // entropy bonus still acts
  CHECK(nn::flatten(s.net.critic) != critic_before);   // value regression acts
  CHECK(std::isfinite(stats.kl));
  CHECK(stats.learning_rate > 0.0);
}

TEST_CASE("ppo update: mean moves toward the action with positive advantage") {
  SyntheticUpdate s = symmetric_pair(1.0, -1.0);
  PpoUpdater updater(s.hyper, s.net.parameter_count(), 1);

  VectorXd obs(3);
  obs << 0.4, -0.2, 0.9;
  const double mean_before = nn::forward1(s.net.actor, obs)[0];
  const double log_std_before = s.net.log_std[0];

  updater.update(s.net, s.batch, s.gae);

  // the positively advantaged action sits above the mean, so the mean rises
  CHECK(nn::forward1(s.net.actor, obs)[0] > mean_before);
  // symmetric actions cancel in the log-std policy gradient, leaving only
  // the entropy bonus, which inflates the noise
  CHECK(s.net.log_std[0] > log_std_before);
}

TEST_CASE("trainer: probabilistic terminations produce sane epoch records") {
  nlohmann::json env_cfg = {{"name", "pendulum"}};
  auto venvs = envs::EnvBatch::create(env_cfg, envs::TaskMode::Reward, 4, 7);

  const auto cset = constraints::ConstraintSet::bind(
      constraints::parse_constraint_decls(
          envs::pendulum_default_constraints(envs::TaskMode::Reward)),
      venvs.env(0).registry());

  TrainSetup setup;
  setup.hyper.horizon = 8;
  setup.hyper.num_envs = 4;
  setup.hyper.epochs = 3;
  setup.hyper.minibatch_size = 32;
  setup.hyper.hidden = {16, 16};
  setup.run_seed = 7;

  Trainer trainer(venvs, cset, setup);
  std::vector<EpochRecord> records;
  trainer.run([&](const EpochRecord& r) { records.push_back(r); });

  REQUIRE(records.size() == 3);
  for (int e = 0; e < 3; ++e) {
    const auto& r = records[static_cast<std::size_t>(e)];
    CHECK(r.epoch == e);
    CHECK(r.total_steps == 32LL * (e + 1));
    CHECK(r.mean_delta >= 0.0);
    CHECK(r.mean_delta <= 1.0);
    CHECK(r.mean_reward_raw > 0.0);
    CHECK(r.mean_reward_shaped <= r.mean_reward_raw + 1e-12);
    REQUIRE(r.c_max.size() == 4);
    REQUIRE(r.p_max.size() == 4);
    for (double c : r.c_max) CHECK(c >= 1e-6);
    for (double p : r.p_max) {
      CHECK(p >= 0.05 - 1e-12);
      CHECK(p <= 0.25 + 1e-12);
    }
    for (double f : r.viol_frac) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
  // soft caps ramp upward over epochs
  CHECK(records[2].p_max[0] > records[0].p_max[0]);
}

TEST_CASE("trainer: binary terminations tie mean delta to the violation fraction") {
  nlohmann::json env_cfg = {{"name", "pendulum"}};
  auto venvs = envs::EnvBatch::create(env_cfg, envs::TaskMode::Reward, 4, 8);

  // one constraint that random torques violate about half the time
  nlohmann::json section = {
      {"torque", {{"kind", "soft"}, {"fn", "torque_limit"}, {"params", {{"limit", 1.0}}}}}};
  const auto cset = constraints::ConstraintSet::bind(
      constraints::parse_constraint_decls(section), venvs.env(0).registry());

  TrainSetup setup;
  setup.hyper.horizon = 8;
  setup.hyper.num_envs = 4;
  setup.hyper.epochs = 2;
  setup.hyper.minibatch_size = 32;
  setup.hyper.hidden = {16, 16};
  setup.termination = TerminationMode::Binary;
  setup.run_seed = 8;

  Trainer trainer(venvs, cset, setup);
  std::vector<EpochRecord> records;
  trainer.run([&](const EpochRecord& r) { records.push_back(r); });

  for (const auto& r : records) {
    CHECK(r.mean_delta == doctest::Approx(r.viol_frac[0]).epsilon(1e-12));
    CHECK(r.mean_delta > 0.0);  // a fresh policy grazes the tight limit
  }
}

TEST_CASE("trainer: penalty shaping clamps at zero and never terminates") {
  nlohmann::json env_cfg = {{"name", "pendulum"}};
  auto venvs = envs::EnvBatch::create(env_cfg, envs::TaskMode::Reward, 4, 9);

  nlohmann::json section = {
      {"torque", {{"kind", "soft"}, {"fn", "torque_limit"}, {"params", {{"limit", 0.5}}}}}};
  const auto cset = constraints::ConstraintSet::bind(
      constraints::parse_constraint_decls(section), venvs.env(0).registry());

  TrainSetup setup;
  setup.hyper.horizon = 8;
  setup.hyper.num_envs = 4;
  setup.hyper.epochs = 2;
  setup.hyper.minibatch_size = 32;
  setup.hyper.hidden = {16, 16};
  setup.termination = TerminationMode::None;
  setup.penalty_weights = {1e6};  // any unclamped sample would swamp the mean
  setup.run_seed = 9;

  Trainer trainer(venvs, cset, setup);
  std::vector<EpochRecord> records;
  trainer.run([&](const EpochRecord& r) { records.push_back(r); });

  for (const auto& r : records) {
    CHECK(r.mean_delta == 0.0);
    CHECK(r.mean_reward_shaped >= 0.0);
    CHECK(r.mean_reward_shaped <= r.mean_reward_raw);
    CHECK(r.viol_frac[0] > 0.0);  // the tight limit is definitely violated
  }
}

TEST_CASE("trainer: penalty weights must match the constraint count") {
  nlohmann::json env_cfg = {{"name", "pendulum"}};
  auto venvs = envs::EnvBatch::create(env_cfg, envs::TaskMode::Reward, 2, 10);
  const auto cset = constraints::ConstraintSet::bind(
      constraints::parse_constraint_decls(
          envs::pendulum_default_constraints(envs::TaskMode::Reward)),
      venvs.env(0).registry());

  TrainSetup setup;
  setup.hyper.horizon = 4;
  setup.hyper.num_envs = 2;
  setup.hyper.minibatch_size = 8;
  setup.penalty_weights = {0.1};  // four constraints declared
  CHECK_THROWS_AS(Trainer(venvs, cset, setup), ConfigError);
}

TEST_CASE("trainer: zero constraints reduce to plain policy optimization") {
  nlohmann::json env_cfg = {{"name", "pendulum"}};
  auto venvs = envs::EnvBatch::create(env_cfg, envs::TaskMode::Reward, 4, 11);
  const auto cset = constraints::ConstraintSet::bind({}, venvs.env(0).registry());

  TrainSetup setup;
  setup.hyper.horizon = 8;
  setup.hyper.num_envs = 4;
  setup.hyper.epochs = 2;
  setup.hyper.minibatch_size = 32;
  setup.hyper.hidden = {16, 16};
  setup.run_seed = 11;

  Trainer trainer(venvs, cset, setup);
  std::vector<EpochRecord> records;
  trainer.run([&](const EpochRecord& r) { records.push_back(r); });
  for (const auto& r : records) {
    CHECK(r.mean_delta == 0.0);
    CHECK(r.mean_reward_shaped == doctest::Approx(r.mean_reward_raw).epsilon(1e-15));
    CHECK(r.c_max.empty());
  }
}

TEST_CASE("termination mode parsing") {
  CHECK(termination_mode_from_string("probabilistic") == TerminationMode::Probabilistic);
  CHECK(termination_mode_from_string("binary") == TerminationMode::Binary);
  CHECK(termination_mode_from_string("none") == TerminationMode::None);
  CHECK_THROWS_AS(termination_mode_from_string("sometimes"), ConfigError);
}
