#include "catrl/baselines/variant.hpp"

#include <algorithm>

namespace catrl::baselines {

Variant variant_from_string(const std::string& name) {
  if (name == "cat") return Variant::Cat;
  if (name == "et_mdp" || name == "etmdp") return Variant::EtMdp;
  if (name == "hard_only") return Variant::HardOnly;
  if (name == "style_always") return Variant::StyleAlways;
  if (name == "penalty") return Variant::Penalty;
  throw ConfigError("unknown variant '" + name +
                    "' (expected cat, et_mdp, hard_only, style_always or penalty)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Cat: return "cat";
    case Variant::EtMdp: return "et_mdp";
    case Variant::HardOnly: return "hard_only";
    case Variant::StyleAlways: return "style_always";
    case Variant::Penalty: return "penalty";
  }
  return "unknown";
}

VariantConfig VariantConfig::from_json(const nlohmann::json& section) {
  VariantConfig cfg;
  if (section.is_null()) return cfg;
  if (!section.is_object()) {
    throw ConfigError("config section 'variant' must be an object");
  }
  if (section.contains("name")) {
    if (!section.at("name").is_string()) {
      throw ConfigError("config field 'variant.name' must be a string");
    }
    cfg.variant = variant_from_string(section.at("name").get<std::string>());
  }
  const bool has_weights = section.contains("penalty_weights");
  if (cfg.variant == Variant::Penalty && !has_weights) {
    throw ConfigError(
        "config field 'variant.penalty_weights' is required for the penalty variant");
  }
  if (cfg.variant != Variant::Penalty && has_weights) {
    throw ConfigError(
        "config field 'variant.penalty_weights' is only valid for the penalty variant");
  }
  if (has_weights) {
    const auto& weights = section.at("penalty_weights");
    if (!weights.is_object()) {
      throw ConfigError("config field 'variant.penalty_weights' must be an object");
    }
    for (auto it = weights.begin(); it != weights.end(); ++it) {
      if (!it.value().is_number()) {
        throw ConfigError("config field 'variant.penalty_weights." + it.key() +
                          "' must be a number");
      }
      const double w = it.value().get<double>();
      if (w < 0.0) {
        throw ConfigError("config field 'variant.penalty_weights." + it.key() +
                          "' must be non-negative");
      }
      cfg.penalty_weights[it.key()] = w;
    }
  }
  return cfg;
}

WiredVariant apply_variant(const VariantConfig& cfg,
                           std::vector<constraints::ConstraintDecl> decls) {
  WiredVariant out;
  out.decls = std::move(decls);

  switch (cfg.variant) {
    case Variant::Cat:
      out.termination = algo::TerminationMode::Probabilistic;
      break;
    case Variant::EtMdp:
      out.termination = algo::TerminationMode::Binary;
      break;
    case Variant::HardOnly:
      out.termination = algo::TerminationMode::Probabilistic;
      for (auto& d : out.decls) d.spec.kind = constraints::ConstraintKind::Hard;
      break;
    case Variant::StyleAlways:
      out.termination = algo::TerminationMode::Probabilistic;
      for (auto& d : out.decls) {
        d.spec.gate.clear();
        d.gate_params = nlohmann::json::object();
      }
      break;
    case Variant::Penalty: {
      out.termination = algo::TerminationMode::None;
      for (const auto& [id, weight] : cfg.penalty_weights) {
        const bool known = std::any_of(out.decls.begin(), out.decls.end(),
                                       [&](const auto& d) { return d.spec.id == id; });
        if (!known) {
          throw ConfigError("penalty weight references unknown constraint '" + id + "'");
        }
        (void)weight;
      }
      out.penalty_weights.reserve(out.decls.size());
      for (const auto& d : out.decls) {
        auto it = cfg.penalty_weights.find(d.spec.id);
        out.penalty_weights.push_back(it == cfg.penalty_weights.end() ? 0.0 : it->second);
      }
      break;
    }
  }
  return out;
}

}  // namespace catrl::baselines
