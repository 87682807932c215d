#pragma once

#include <vector>

#include <json.hpp>

#include "catrl/common.hpp"
#include "catrl/nn/mlp.hpp"

namespace catrl::algo {

/// PPO and network hyperparameters. Defaults are the values used by every
/// preset; the "algo" config section can override any of them.
struct PpoHyper {
  int horizon = 24;
  int num_envs = 256;
  int epochs = 300;
  int mini_epochs = 5;
  int minibatch_size = 1536;
  double gamma = 0.99;
  double lam = 0.95;
  double clip = 0.2;
  double entropy_coef = 1e-3;
  double critic_coef = 2.0;
  double learning_rate = 3e-4;
  double kl_threshold = 8e-3;
  double lr_min = 1e-6;
  double lr_max = 1e-2;
  double max_grad_norm = 1.0;
  std::vector<int> hidden = {64, 64};
  nn::Activation activation = nn::Activation::Elu;
  double tau_c = 0.95;
  double c_max_floor = 1e-6;

  /// Parses the "algo" config section over these defaults. Throws
  /// ConfigError naming the offending field.
  static PpoHyper from_json(const nlohmann::json& algo_cfg);

  /// Sanity-checks ranges (positive sizes, gamma/lam in (0,1], ...).
  void validate() const;

  int batch_size() const { return horizon * num_envs; }
};

}  // namespace catrl::algo
