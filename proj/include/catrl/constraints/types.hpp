#pragma once

#include <string>

#include "catrl/common.hpp"

namespace catrl::constraints {

/// Hard constraints terminate with maximum probability 1 whenever violated;
/// soft constraints ramp their maximum termination probability over training.
enum class ConstraintKind { Hard, Soft };

ConstraintKind kind_from_string(const std::string& name);
std::string to_string(ConstraintKind kind);

/// Linear ramp of the maximum termination probability for soft constraints:
/// p_start at epoch 0, p_end after ramp_fraction of the run, constant after.
struct SoftSchedule {
  double p_start = 0.05;
  double p_end = 0.25;
  double ramp_fraction = 1.0;
};

/// Declarative description of one constraint. The violation function and the
/// optional gate are identifiers resolved against the environment's registry;
/// `params` carries the limits and thresholds that the function needs.
struct ConstraintSpec {
  std::string id;
  ConstraintKind kind = ConstraintKind::Soft;
  std::string violation_fn;
  std::string gate;   // empty = always active
  std::string group;  // reporting label (task / safety / style)
};

/// Evaluated constraint at one transition. `positive` is max(0, value) when
/// the gate is active and exactly 0 when gated off.
struct ViolationRecord {
  double value = 0.0;
  double positive = 0.0;
  bool active = true;
};

}  // namespace catrl::constraints
