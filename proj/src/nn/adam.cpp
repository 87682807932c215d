#include "catrl/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace catrl::nn {

AdamState make_adam(Eigen::Index size, double learning_rate) {
  AdamState s;
  s.m = VectorXd::Zero(size);
  s.v = VectorXd::Zero(size);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(AdamState& state, VectorXd& params, const VectorXd& grads) {
  if (params.size() != state.m.size() || grads.size() != state.m.size()) {
    throw std::logic_error("adam_step: size mismatch");
  }
  if (!grads.allFinite()) {
    throw TrainingError("adam_step: non-finite gradient");
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v.array().matrix() +
            (1.0 - state.beta2) * grads.array().square().matrix();
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.learning_rate * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + state.epsilon);
}

}  // namespace catrl::nn
