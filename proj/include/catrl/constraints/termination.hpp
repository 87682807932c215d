#pragma once

#include <span>
#include <vector>

#include "catrl/constraints/types.hpp"

namespace catrl::constraints {

/// Per-constraint running normalizer for the termination probability:
/// an exponential moving average of the batch-maximum violation, floored
/// away from zero so the normalization is always defined.
struct TerminationState {
  VectorXd c_max;
  double tau_c = 0.95;
  double c_max_floor = 1e-6;
  int epoch = 0;

  static TerminationState create(int num_constraints, double tau_c = 0.95,
                                 double c_max_floor = 1e-6);
};

/// Maximum termination probability for one constraint at the given point of
/// training. Hard constraints always return 1; soft constraints follow the
/// schedule's linear ramp.
double p_max(const ConstraintSpec& spec, const SoftSchedule& schedule, int epoch,
             int total_epochs);

/// One EMA update from the positive violations of a collected batch
/// (rows = samples, cols = constraints). Reduces the batch by max, so the
/// result does not depend on sample order.
void update_c_max(TerminationState& state, const MatrixXd& batch_positive);

/// Same update from precomputed per-constraint batch maxima.
void update_c_max_from_max(TerminationState& state, const VectorXd& batch_max);

/// Termination probability: delta = max_i p_max_i * clip(c_i^+ / c_max_i, 0, 1).
double termination_probability(const TerminationState& state,
                               std::span<const ViolationRecord> violations,
                               std::span<const double> p_maxes);

/// Same, from a row of already-gated positive violations (0 where inactive).
double termination_probability(const TerminationState& state, const VectorXd& positive,
                               std::span<const double> p_maxes);

/// Binary termination: 1 if any active constraint is violated, else 0.
double naive_termination(std::span<const ViolationRecord> violations);

}  // namespace catrl::constraints
