#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "catrl/nn/adam.hpp"
#include "catrl/nn/gaussian.hpp"
#include "catrl/nn/mlp.hpp"
#include "catrl/nn/policy.hpp"

using namespace catrl;
using namespace catrl::nn;

namespace {

MlpParams random_mlp(const std::vector<int>& sizes, Activation act, Rng& rng,
                     double scale = 0.5) {
  std::normal_distribution<double> dist(0.0, scale);
  MlpParams p = make_mlp(sizes, act);
  for (auto& w : p.weights) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  }
  for (auto& b : p.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = dist(rng);
  }
  return p;
}

double elu_ref(double x) { return x > 0.0 ? x : std::exp(x) - 1.0; }

// Independent forward pass: plain loops, no Eigen products.
VectorXd forward_by_hand(const MlpParams& p, const VectorXd& input) {
  std::vector<double> cur(input.data(), input.data() + input.size());
  for (int l = 0; l < p.num_layers(); ++l) {
    const auto& W = p.weights[static_cast<std::size_t>(l)];
    const auto& b = p.biases[static_cast<std::size_t>(l)];
    std::vector<double> next(static_cast<std::size_t>(W.rows()), 0.0);
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      double acc = b[r];
      for (Eigen::Index c = 0; c < W.cols(); ++c) {
        acc += W(r, c) * cur[static_cast<std::size_t>(c)];
      }
      if (l + 1 < p.num_layers()) {
        acc = p.activation == Activation::Elu ? elu_ref(acc) : std::tanh(acc);
      }
      next[static_cast<std::size_t>(r)] = acc;
    }
    cur = std::move(next);
  }
  VectorXd out(static_cast<Eigen::Index>(cur.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = cur[static_cast<std::size_t>(i)];
  return out;
}

// Scalar loss used for finite-difference checks: weighted sum of outputs.
double weighted_output(const MlpParams& p, const MatrixXd& input, const MatrixXd& w) {
  return (forward(p, input).array() * w.array()).sum();
}

}  // namespace

TEST_CASE("forward: zero parameters give zero output") {
  MlpParams p = make_mlp({3, 5, 2}, Activation::Elu);
  VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  CHECK(forward1(p, x).isZero(0.0));
}

TEST_CASE("forward: single tanh layer maps zero to zero") {
  // identity weights on a 2x2 single layer; output layer is linear so use
  // a two-layer net whose hidden layer is the tanh
  MlpParams p = make_mlp({2, 2, 2}, Activation::Tanh);
  p.weights[0] = MatrixXd::Identity(2, 2);
  p.weights[1] = MatrixXd::Identity(2, 2);
  VectorXd x = VectorXd::Zero(2);
  CHECK(forward1(p, x).isZero(0.0));
}

TEST_CASE("forward: matches a hand-rolled oracle") {
  Rng rng = make_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Activation act = trial % 2 == 0 ? Activation::Elu : Activation::Tanh;
    MlpParams p = random_mlp({4, 7, 5, 3}, act, rng);
    std::normal_distribution<double> dist(0.0, 1.0);
    VectorXd x(4);
    for (int i = 0; i < 4; ++i) x[i] = dist(rng);
    const VectorXd got = forward1(p, x);
    const VectorXd want = forward_by_hand(p, x);
    REQUIRE(got.size() == want.size());
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("forward: batched columns agree with per-sample calls") {
  Rng rng = make_rng(12, 0);
  MlpParams p = random_mlp({3, 8, 2}, Activation::Elu, rng);
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd batch(3, 6);
  for (Eigen::Index i = 0; i < batch.size(); ++i) batch.data()[i] = dist(rng);
  const MatrixXd out = forward(p, batch);
  for (int j = 0; j < 6; ++j) {
    CHECK((out.col(j) - forward1(p, batch.col(j))).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("backward: zero output gradient yields zero parameter gradients") {
  Rng rng = make_rng(13, 0);
  MlpParams p = random_mlp({4, 6, 2}, Activation::Elu, rng);
  MatrixXd x = MatrixXd::Random(4, 3);
  ForwardCache cache;
  forward(p, x, &cache);
  const MlpGrads g = backward(p, cache, MatrixXd::Zero(2, 3));
  for (const auto& gw : g.weights) CHECK(gw.isZero(0.0));
  for (const auto& gb : g.biases) CHECK(gb.isZero(0.0));
}

TEST_CASE("backward: single linear layer gradient is g x^T") {
  Rng rng = make_rng(14, 0);
  MlpParams p = random_mlp({3, 2}, Activation::Elu, rng);  // one layer = linear
  VectorXd x(3);
  x << 0.5, -1.0, 2.0;
  VectorXd g(2);
  g << 1.5, -0.25;
  ForwardCache cache;
  forward(p, x, &cache);
  const MlpGrads grads = backward(p, cache, g);
  const MatrixXd want = g * x.transpose();
  CHECK((grads.weights[0] - want).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((grads.biases[0] - g).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("backward: matches central finite differences") {
  Rng rng = make_rng(15, 0);
  const double h = 1e-5;
  const std::vector<std::vector<int>> shapes = {{2, 4, 1}, {4, 8, 8, 2}, {3, 5, 1}};
  for (const auto& shape : shapes) {
    for (int seed = 0; seed < 10; ++seed) {
      const Activation act = seed % 2 == 0 ? Activation::Elu : Activation::Tanh;
      MlpParams p = random_mlp(shape, act, rng);
      std::normal_distribution<double> dist(0.0, 1.0);
      MatrixXd x(shape.front(), 3);
      MatrixXd w(shape.back(), 3);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);

      ForwardCache cache;
      forward(p, x, &cache);
      const VectorXd analytic = flatten(backward(p, cache, w));

      VectorXd flat = flatten(p);
      VectorXd numeric(flat.size());
      for (Eigen::Index i = 0; i < flat.size(); ++i) {
        VectorXd bumped = flat;
        bumped[i] = flat[i] + h;
        unflatten(bumped, p);
        const double up = weighted_output(p, x, w);
        bumped[i] = flat[i] - h;
        unflatten(bumped, p);
        const double down = weighted_output(p, x, w);
        numeric[i] = (up - down) / (2.0 * h);
      }
      unflatten(flat, p);

      for (Eigen::Index i = 0; i < flat.size(); ++i) {
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1.0});
        CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
      }
    }
  }
}

TEST_CASE("backward: rejects a cache from a different shape") {
  Rng rng = make_rng(16, 0);
  MlpParams p = random_mlp({3, 4, 2}, Activation::Elu, rng);
  MlpParams q = random_mlp({3, 5, 2}, Activation::Elu, rng);
  ForwardCache cache;
  forward(p, MatrixXd::Random(3, 2), &cache);
  CHECK_THROWS_AS(backward(q, cache, MatrixXd::Zero(2, 2)), std::logic_error);
}

TEST_CASE("flatten/unflatten round-trips") {
  Rng rng = make_rng(17, 0);
  MlpParams p = random_mlp({4, 6, 3}, Activation::Tanh, rng);
  const VectorXd flat = flatten(p);
  CHECK(flat.size() == p.parameter_count());
  MlpParams q = make_mlp({4, 6, 3}, Activation::Tanh);
  unflatten(flat, q);
  for (int l = 0; l < p.num_layers(); ++l) {
    CHECK(p.weights[static_cast<std::size_t>(l)] == q.weights[static_cast<std::size_t>(l)]);
    CHECK(p.biases[static_cast<std::size_t>(l)] == q.biases[static_cast<std::size_t>(l)]);
  }
}

TEST_CASE("orthogonal init: hidden rows are orthogonal with gain sqrt(2)") {
  Rng rng = make_rng(18, 0);
  MlpParams p = make_mlp({64, 32, 4}, Activation::Elu);
  init_orthogonal(p, rng, 0.01);
  const MatrixXd& W = p.weights[0];  // 32 x 64, rows fit orthonormally
  const MatrixXd gram = W * W.transpose() / 2.0;
  CHECK((gram - MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& b : p.biases) CHECK(b.isZero(0.0));
  // small final layer
  CHECK(p.weights[1].cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("gaussian_log_prob: standard normal at zero") {
  VectorXd zero1 = VectorXd::Zero(1);
  CHECK(gaussian_log_prob(zero1, zero1, zero1) == doctest::Approx(-0.9189385).epsilon(1e-6));
}

TEST_CASE("gaussian_log_prob: zero quadratic term at the mean") {
  Rng rng = make_rng(19, 0);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + trial % 4;
    VectorXd mean(d), log_std(d);
    for (int i = 0; i < d; ++i) {
      mean[i] = dist(rng);
      log_std[i] = 0.5 * dist(rng);
    }
    const double want = -log_std.sum() - d * 0.9189385332046727;
    CHECK(gaussian_log_prob(mean, log_std, mean) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("gaussian_log_prob: density integrates to one on a 1-D grid") {
  VectorXd mean(1), log_std(1), a(1);
  mean << 0.3;
  log_std << -0.2;
  const double sigma = std::exp(log_std[0]);
  const double lo = mean[0] - 8.0 * sigma, hi = mean[0] + 8.0 * sigma;
  const int n = 20001;
  const double step = (hi - lo) / (n - 1);
  double integral = 0.0;
  for (int i = 0; i < n; ++i) {
    a[0] = lo + i * step;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;  // trapezoid
    integral += w * std::exp(gaussian_log_prob(mean, log_std, a)) * step;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("gaussian_log_prob: batch version matches the scalar one") {
  Rng rng = make_rng(20, 0);
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd means(3, 5), actions(3, 5);
  VectorXd log_std(3);
  for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = dist(rng);
  for (Eigen::Index i = 0; i < actions.size(); ++i) actions.data()[i] = dist(rng);
  for (int i = 0; i < 3; ++i) log_std[i] = 0.3 * dist(rng);
  const VectorXd lp = gaussian_log_prob_batch(means, log_std, actions);
  for (int j = 0; j < 5; ++j) {
    CHECK(lp[j] == doctest::Approx(gaussian_log_prob(means.col(j), log_std,
                                                     actions.col(j)))
                       .epsilon(1e-12));
  }
}

TEST_CASE("gaussian_entropy: unit sigma closed form") {
  VectorXd log_std = VectorXd::Zero(1);
  CHECK(gaussian_entropy(log_std) == doctest::Approx(1.4189385).epsilon(1e-6));
}

TEST_CASE("gaussian_entropy: doubling sigma adds log 2 per dimension") {
  VectorXd log_std(3);
  log_std << -0.5, 0.0, 0.7;
  const double base = gaussian_entropy(log_std);
  VectorXd doubled = log_std.array() + std::log(2.0);
  CHECK(gaussian_entropy(doubled) == doctest::Approx(base + 3 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("gaussian_entropy: agrees with a Monte-Carlo estimate") {
  Rng rng = make_rng(21, 0);
  VectorXd log_std(2);
  log_std << 0.4, -0.8;
  const VectorXd mean = VectorXd::Zero(2);
  const VectorXd sigma = log_std.array().exp();
  std::normal_distribution<double> unit(0.0, 1.0);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    VectorXd a(2);
    for (int d = 0; d < 2; ++d) a[d] = mean[d] + sigma[d] * unit(rng);
    const double nll = -gaussian_log_prob(mean, log_std, a);
    sum += nll;
    sum_sq += nll * nll;
  }
  const double est = sum / n;
  const double var = sum_sq / n - est * est;
  const double se = std::sqrt(var / n);
  CHECK(std::abs(est - gaussian_entropy(log_std)) < 3.0 * se + 1e-9);
}

TEST_CASE("gaussian_kl: zero for identical distributions, positive otherwise") {
  Rng rng = make_rng(22, 0);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd m1(2), m2(2), s1(2), s2(2);
    for (int d = 0; d < 2; ++d) {
      m1[d] = dist(rng);
      m2[d] = dist(rng);
      s1[d] = 0.4 * dist(rng);
      s2[d] = 0.4 * dist(rng);
    }
    CHECK(gaussian_kl(m1, s1, m1, s1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gaussian_kl(m1, s1, m2, s2) >= -1e-12);
  }
  // hand case: KL(N(0,1) || N(1,1)) = 0.5
  VectorXd z = VectorXd::Zero(1), one = VectorXd::Ones(1);
  CHECK(gaussian_kl(z, z, one, z) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  AdamState adam = make_adam(5, 1e-3);
  VectorXd params = VectorXd::LinSpaced(5, -1.0, 1.0);
  const VectorXd before = params;
  for (int i = 0; i < 7; ++i) adam_step(adam, params, VectorXd::Zero(5));
  CHECK(params == before);
  CHECK(adam.step == 7);
}

TEST_CASE("adam: first step moves each parameter by about the learning rate") {
  const double lr = 0.01;
  AdamState adam = make_adam(4, lr);
  VectorXd params = VectorXd::Zero(4);
  adam_step(adam, params, VectorXd::Ones(4));
  for (int i = 0; i < 4; ++i) {
    CHECK(params[i] == doctest::Approx(-lr).epsilon(1e-6));
  }
}

TEST_CASE("adam: shrinks a quadratic monotonically") {
  AdamState adam = make_adam(1, 0.05);
  VectorXd theta = VectorXd::Ones(1);
  double prev = std::abs(theta[0]);
  for (int i = 0; i < 10; ++i) {
    VectorXd grad(1);
    grad << theta[0];  // d/dtheta of 0.5*theta^2
    adam_step(adam, theta, grad);
    CHECK(std::abs(theta[0]) < prev);
    prev = std::abs(theta[0]);
  }
}

TEST_CASE("adam: rejects non-finite gradients") {
  AdamState adam = make_adam(2, 1e-3);
  VectorXd params = VectorXd::Zero(2);
  VectorXd grad(2);
  grad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(adam, params, grad), TrainingError);
}

TEST_CASE("policy net: flatten/load round-trip and log-std clamping") {
  Rng rng = make_rng(23, 0);
  PolicyValueNet net = make_policy_value_net(4, 2, {8, 8}, Activation::Elu, rng);
  CHECK(net.obs_dim() == 4);
  CHECK(net.act_dim() == 2);

  VectorXd flat = net.flatten_params();
  CHECK(flat.size() == net.parameter_count());
  flat[0] += 0.125;
  net.load_flat(flat);
  CHECK(net.flatten_params() == flat);

  net.log_std[0] = 9.0;
  net.log_std[1] = -9.0;
  net.clamp_log_std();
  CHECK(net.log_std[0] == net.log_std_max);
  CHECK(net.log_std[1] == net.log_std_min);
}

TEST_CASE("policy net: values are the critic's scalar output per column") {
  Rng rng = make_rng(24, 0);
  PolicyValueNet net = make_policy_value_net(3, 1, {8}, Activation::Tanh, rng);
  MatrixXd obs = MatrixXd::Random(3, 4);
  const VectorXd v = net.values(obs);
  REQUIRE(v.size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(v[j] == doctest::Approx(forward1(net.critic, obs.col(j))[0]).epsilon(1e-14));
  }
}

TEST_CASE("activation parsing") {
  CHECK(activation_from_string("elu") == Activation::Elu);
  CHECK(activation_from_string("tanh") == Activation::Tanh);
  CHECK_THROWS_AS(activation_from_string("relu"), ConfigError);
  CHECK(to_string(Activation::Elu) == "elu");
}
