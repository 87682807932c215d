#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "catrl/constraints/types.hpp"
#include "catrl/envs/types.hpp"

namespace catrl::constraints {

/// One constraint as declared in the experiment config: the spec plus the
/// parameter objects handed to the registry factories and the ramp schedule
/// used when the constraint is soft.
struct ConstraintDecl {
  ConstraintSpec spec;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json gate_params = nlohmann::json::object();
  SoftSchedule schedule;
};

/// Parses the "constraints" config section: an object mapping each
/// constraint id to its declaration. Declarations are ordered by id (the
/// order in which the parser visits object keys), which fixes the
/// constraint indexing for the whole run. Throws ConfigError with the
/// offending field path on schema violations.
std::vector<ConstraintDecl> parse_constraint_decls(const nlohmann::json& section);

/// A constraint bound to a concrete violation function (and optional gate).
struct BoundConstraint {
  ConstraintSpec spec;
  SoftSchedule schedule;
  envs::ViolationFn fn;
  envs::GateFn gate;  // null means always active
};

/// The fixed, ordered collection of constraints for a run. Binding resolves
/// every declared function and gate name against the environment's registry
/// up front, so unknown names fail at setup rather than mid-training.
class ConstraintSet {
 public:
  static ConstraintSet bind(const std::vector<ConstraintDecl>& decls,
                            const envs::ConstraintRegistry& registry);

  int size() const { return static_cast<int>(bound_.size()); }
  const std::vector<BoundConstraint>& all() const { return bound_; }
  const BoundConstraint& at(int i) const { return bound_.at(static_cast<std::size_t>(i)); }
  std::vector<std::string> ids() const;

  /// Evaluates every constraint on one transition, in declaration order.
  void evaluate_into(const envs::Transition& t, std::vector<ViolationRecord>& out) const;
  std::vector<ViolationRecord> evaluate(const envs::Transition& t) const;

  /// Per-constraint termination caps at the given point of training.
  std::vector<double> p_maxes(int epoch, int total_epochs) const;

 private:
  std::vector<BoundConstraint> bound_;
};

}  // namespace catrl::constraints
