#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "catrl/algo/trainer.hpp"
#include "catrl/constraints/set.hpp"

namespace catrl::baselines {

/// Training variants. `Cat` is the full method; the others are the
/// comparison baselines and ablations:
///  - EtMdp: binary termination on any violation, no violation scaling
///  - HardOnly: every constraint treated as hard (termination cap 1)
///  - StyleAlways: constraint gates removed, style terms always active
///  - Penalty: no terminations, violations subtracted from the reward
enum class Variant { Cat, EtMdp, HardOnly, StyleAlways, Penalty };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);

struct VariantConfig {
  Variant variant = Variant::Cat;
  std::map<std::string, double> penalty_weights;  // by constraint id

  /// Parses the "variant" config section: {"name": ..., "penalty_weights":
  /// {...}}. penalty_weights is required for the penalty variant (possibly
  /// empty = all zero) and rejected for every other variant.
  static VariantConfig from_json(const nlohmann::json& section);
};

/// Constraint declarations and trainer settings after a variant is applied.
struct WiredVariant {
  algo::TerminationMode termination = algo::TerminationMode::Probabilistic;
  std::vector<constraints::ConstraintDecl> decls;
  std::vector<double> penalty_weights;  // aligned with decls; empty if unused
};

/// Rewrites the declared constraints and picks the termination mode for the
/// chosen variant. Throws ConfigError if penalty weights name an unknown
/// constraint id.
WiredVariant apply_variant(const VariantConfig& cfg,
                           std::vector<constraints::ConstraintDecl> decls);

}  // namespace catrl::baselines
