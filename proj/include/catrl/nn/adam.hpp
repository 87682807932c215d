#pragma once

#include <cstdint>

#include "catrl/common.hpp"

namespace catrl::nn {

/// Adaptive-moment optimizer state over a flat parameter vector.
struct AdamState {
  VectorXd m;
  VectorXd v;
  std::int64_t step = 0;
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam(Eigen::Index size, double learning_rate);

/// One optimizer step in place. Throws TrainingError on non-finite gradients.
void adam_step(AdamState& state, VectorXd& params, const VectorXd& grads);

}  // namespace catrl::nn
