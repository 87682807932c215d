#include "catrl/constraints/termination.hpp"

#include <algorithm>
#include <stdexcept>

namespace catrl::constraints {

ConstraintKind kind_from_string(const std::string& name) {
  if (name == "hard") return ConstraintKind::Hard;
  if (name == "soft") return ConstraintKind::Soft;
  throw ConfigError("unknown constraint kind '" + name + "' (expected hard or soft)");
}

std::string to_string(ConstraintKind kind) {
  return kind == ConstraintKind::Hard ? "hard" : "soft";
}

TerminationState TerminationState::create(int num_constraints, double tau_c,
                                          double c_max_floor) {
  TerminationState s;
  s.c_max = VectorXd::Constant(num_constraints, c_max_floor);
  s.tau_c = tau_c;
  s.c_max_floor = c_max_floor;
  return s;
}

double p_max(const ConstraintSpec& spec, const SoftSchedule& schedule, int epoch,
             int total_epochs) {
  if (spec.kind == ConstraintKind::Hard) return 1.0;
  const double ramp_epochs = schedule.ramp_fraction * static_cast<double>(total_epochs);
  double progress = ramp_epochs > 0.0 ? static_cast<double>(epoch) / ramp_epochs : 1.0;
  progress = std::clamp(progress, 0.0, 1.0);
  return schedule.p_start + (schedule.p_end - schedule.p_start) * progress;
}

void update_c_max(TerminationState& state, const MatrixXd& batch_positive) {
  if (batch_positive.rows() == 0) {
    throw std::logic_error("update_c_max: empty batch");
  }
  update_c_max_from_max(state, batch_positive.colwise().maxCoeff().transpose());
}

void update_c_max_from_max(TerminationState& state, const VectorXd& batch_max) {
  if (batch_max.size() != state.c_max.size()) {
    throw std::logic_error("update_c_max: constraint count mismatch");
  }
  state.c_max = (state.tau_c * state.c_max + (1.0 - state.tau_c) * batch_max)
                    .cwiseMax(state.c_max_floor);
}

double termination_probability(const TerminationState& state, const VectorXd& positive,
                               std::span<const double> p_maxes) {
  if (static_cast<std::size_t>(positive.size()) != p_maxes.size() ||
      positive.size() != state.c_max.size()) {
    throw std::logic_error("termination_probability: length mismatch");
  }
  double delta = 0.0;
  for (Eigen::Index i = 0; i < positive.size(); ++i) {
    const double ratio =
        std::clamp(positive[i] / state.c_max[i], 0.0, 1.0);
    delta = std::max(delta, p_maxes[static_cast<std::size_t>(i)] * ratio);
  }
  return delta;
}

double termination_probability(const TerminationState& state,
                               std::span<const ViolationRecord> violations,
                               std::span<const double> p_maxes) {
  VectorXd positive(static_cast<Eigen::Index>(violations.size()));
  for (std::size_t i = 0; i < violations.size(); ++i) {
    positive[static_cast<Eigen::Index>(i)] = violations[i].positive;
  }
  return termination_probability(state, positive, p_maxes);
}

double naive_termination(std::span<const ViolationRecord> violations) {
  for (const auto& v : violations) {
    if (v.active && v.value > 0.0) return 1.0;
  }
  return 0.0;
}

}  // namespace catrl::constraints
