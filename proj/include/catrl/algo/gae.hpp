#pragma once

#include "catrl/common.hpp"

namespace catrl::algo {

struct GaeResult {
  MatrixXd advantages;  // horizon x num_envs
  MatrixXd returns;     // horizon x num_envs, advantage + value
};

/// Generalised advantage estimation with probabilistic terminations.
///
/// All step-indexed inputs are horizon x num_envs. `deltas(t, n)` is the
/// probability that the trajectory of environment n ends after step t; it
/// discounts both the bootstrap value and the advantage carried back from
/// later steps by (1 - delta). `timeouts` marks steps that ended an episode
/// by running out of time; those bootstrap through `timeout_values` (the
/// critic at the episode's final observation) and cut the carried advantage,
/// since the following row belongs to a fresh episode. The last row
/// bootstraps from `bootstrap_values` unless it timed out.
GaeResult compute_gae(const MatrixXd& rewards, const MatrixXd& values,
                      const MatrixXd& deltas, const MatrixXd& timeouts,
                      const MatrixXd& timeout_values,
                      const VectorXd& bootstrap_values, double gamma, double lam);

}  // namespace catrl::algo
