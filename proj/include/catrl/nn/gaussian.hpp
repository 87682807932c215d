#pragma once

#include <cmath>

#include "catrl/common.hpp"

namespace catrl::nn {

inline constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

/// Log density of a diagonal Gaussian at `action`.
inline double gaussian_log_prob(const VectorXd& mean, const VectorXd& log_std,
                                const VectorXd& action) {
  if (mean.size() != log_std.size() || mean.size() != action.size()) {
    throw ConfigError("gaussian_log_prob: dimension mismatch");
  }
  double lp = 0.0;
  for (Eigen::Index d = 0; d < mean.size(); ++d) {
    const double inv_std = std::exp(-log_std[d]);
    const double z = (action[d] - mean[d]) * inv_std;
    lp += -0.5 * z * z - log_std[d] - kHalfLog2Pi;
  }
  return lp;
}

/// Column-per-sample batched log densities.
inline VectorXd gaussian_log_prob_batch(const MatrixXd& means, const VectorXd& log_std,
                                        const MatrixXd& actions) {
  if (means.rows() != log_std.size() || means.rows() != actions.rows() ||
      means.cols() != actions.cols()) {
    throw ConfigError("gaussian_log_prob_batch: dimension mismatch");
  }
  const Eigen::ArrayXd inv_var = (-2.0 * log_std.array()).exp();
  const double log_std_sum = log_std.sum();
  const double dim = static_cast<double>(means.rows());
  MatrixXd diff = actions - means;
  VectorXd lp(means.cols());
  for (Eigen::Index j = 0; j < means.cols(); ++j) {
    lp[j] = -0.5 * (diff.col(j).array().square() * inv_var).sum() - log_std_sum -
            dim * kHalfLog2Pi;
  }
  return lp;
}

/// Differential entropy of a diagonal Gaussian: sum_d (log sigma_d + 0.5*log(2*pi*e)).
inline double gaussian_entropy(const VectorXd& log_std) {
  return log_std.sum() + static_cast<double>(log_std.size()) * (kHalfLog2Pi + 0.5);
}

/// KL(N(mean1, std1) || N(mean2, std2)) for diagonal Gaussians.
inline double gaussian_kl(const VectorXd& mean1, const VectorXd& log_std1,
                          const VectorXd& mean2, const VectorXd& log_std2) {
  double kl = 0.0;
  for (Eigen::Index d = 0; d < mean1.size(); ++d) {
    const double var1 = std::exp(2.0 * log_std1[d]);
    const double inv_var2 = std::exp(-2.0 * log_std2[d]);
    const double dm = mean1[d] - mean2[d];
    kl += log_std2[d] - log_std1[d] + 0.5 * (var1 + dm * dm) * inv_var2 - 0.5;
  }
  return kl;
}

}  // namespace catrl::nn
