#include "catrl/algo/gae.hpp"

#include <stdexcept>

namespace catrl::algo {

GaeResult compute_gae(const MatrixXd& rewards, const MatrixXd& values,
                      const MatrixXd& deltas, const MatrixXd& timeouts,
                      const MatrixXd& timeout_values,
                      const VectorXd& bootstrap_values, double gamma, double lam) {
  const Eigen::Index horizon = rewards.rows();
  const Eigen::Index num_envs = rewards.cols();
  auto same_shape = [&](const MatrixXd& m) {
    return m.rows() == horizon && m.cols() == num_envs;
  };
  if (!same_shape(values) || !same_shape(deltas) || !same_shape(timeouts) ||
      !same_shape(timeout_values) || bootstrap_values.size() != num_envs) {
    throw std::logic_error("advantage inputs disagree on horizon or environment count");
  }
  if (horizon == 0) throw std::logic_error("advantage computation needs at least one step");
  if ((deltas.array() < 0.0).any() || (deltas.array() > 1.0).any()) {
    throw std::logic_error("termination probabilities must lie in [0, 1]");
  }

  GaeResult out;
  out.advantages.resize(horizon, num_envs);
  out.returns.resize(horizon, num_envs);

  for (Eigen::Index n = 0; n < num_envs; ++n) {
    double carry = 0.0;
    for (Eigen::Index t = horizon - 1; t >= 0; --t) {
      const bool timed_out = timeouts(t, n) != 0.0;
      double next_value;
      if (timed_out) {
        next_value = timeout_values(t, n);
      } else if (t == horizon - 1) {
        next_value = bootstrap_values(n);
      } else {
        next_value = values(t + 1, n);
      }
      const double cont = 1.0 - deltas(t, n);
      const double bellman_error =
          rewards(t, n) + gamma * cont * next_value - values(t, n);
      carry = bellman_error + gamma * lam * cont * (timed_out ? 0.0 : carry);
      out.advantages(t, n) = carry;
      out.returns(t, n) = carry + values(t, n);
    }
  }
  return out;
}

}  // namespace catrl::algo
