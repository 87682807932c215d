#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "catrl/algo/hyper.hpp"
#include "catrl/baselines/variant.hpp"
#include "catrl/constraints/set.hpp"
#include "catrl/envs/env.hpp"

namespace catrl::harness {

/// Everything one run needs, parsed from a config document with sections
/// env / constraints / algo / variant / run. `resolved` is the document
/// after overrides and default-section injection; persisting it and loading
/// it back reproduces the run exactly.
struct ExperimentConfig {
  nlohmann::json env;  // env section, including "name" and optional "task_mode"
  envs::TaskMode task_mode = envs::TaskMode::Reward;
  std::vector<constraints::ConstraintDecl> constraints;
  baselines::VariantConfig variant;
  algo::PpoHyper hyper;
  std::uint64_t seed = 0;
  std::string output_dir = "run";
  int eval_episodes = 50;

  nlohmann::json resolved;

  /// Parses and validates a config document. Omitting the "constraints"
  /// section selects the environment's default set; an explicitly empty
  /// object declares zero constraints.
  static ExperimentConfig parse(nlohmann::json root);

  /// Reads the file, applies "dotted.path=value" overrides, then parses.
  static ExperimentConfig load(const std::string& path,
                               const std::vector<std::string>& overrides);
};

/// Applies one "a.b.c=value" assignment to the document, creating
/// intermediate objects as needed. Values parse as JSON when possible and
/// fall back to strings. "variant=<name>" is shorthand for "variant.name".
void apply_override(nlohmann::json& root, const std::string& assignment);

/// Sets a dotted path to an already-parsed value.
void set_by_path(nlohmann::json& root, const std::string& path, nlohmann::json value);

/// Output directory resolution: absolute paths pass through; relative paths
/// land under $CATRL_OUTPUT_ROOT (or the working directory if unset).
std::string resolve_output_dir(const std::string& output_dir);

}  // namespace catrl::harness
