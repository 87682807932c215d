#include "catrl/constraints/set.hpp"

#include <algorithm>
#include <cmath>

#include "catrl/constraints/termination.hpp"

namespace catrl::constraints {

namespace {

std::string entry_path(const std::string& id, const char* field) {
  return "constraints." + id + "." + field;
}

std::string require_string(const nlohmann::json& entry, const std::string& id,
                           const char* field) {
  if (!entry.contains(field) || !entry.at(field).is_string()) {
    throw ConfigError("config field '" + entry_path(id, field) + "' must be a string");
  }
  return entry.at(field).get<std::string>();
}

std::string optional_string(const nlohmann::json& entry, const std::string& id,
                            const char* field) {
  if (!entry.contains(field)) return "";
  if (!entry.at(field).is_string()) {
    throw ConfigError("config field '" + entry_path(id, field) + "' must be a string");
  }
  return entry.at(field).get<std::string>();
}

double schedule_num(const nlohmann::json& sched, const std::string& id, const char* field,
                    double fallback) {
  if (!sched.contains(field)) return fallback;
  if (!sched.at(field).is_number()) {
    throw ConfigError("config field '" + entry_path(id, "schedule.") + field +
                      "' must be a number");
  }
  return sched.at(field).get<double>();
}

}  // namespace

std::vector<ConstraintDecl> parse_constraint_decls(const nlohmann::json& section) {
  if (!section.is_object()) {
    throw ConfigError("config section 'constraints' must be an object keyed by id");
  }
  std::vector<ConstraintDecl> decls;
  for (auto it = section.begin(); it != section.end(); ++it) {
    const std::string& id = it.key();
    const auto& entry = it.value();
    if (id.empty()) {
      throw ConfigError("constraint ids must be non-empty");
    }
    if (!entry.is_object()) {
      throw ConfigError("config field 'constraints." + id + "' must be an object");
    }
    ConstraintDecl d;
    d.spec.id = id;
    const std::string kind = require_string(entry, id, "kind");
    try {
      d.spec.kind = kind_from_string(kind);
    } catch (const ConfigError&) {
      throw ConfigError("config field '" + entry_path(id, "kind") +
                        "' must be 'hard' or 'soft', got '" + kind + "'");
    }
    d.spec.violation_fn = require_string(entry, id, "fn");
    d.spec.gate = optional_string(entry, id, "gate");
    d.spec.group = optional_string(entry, id, "group");
    if (entry.contains("params")) {
      if (!entry.at("params").is_object()) {
        throw ConfigError("config field '" + entry_path(id, "params") + "' must be an object");
      }
      d.params = entry.at("params");
    }
    if (entry.contains("gate_params")) {
      if (!entry.at("gate_params").is_object()) {
        throw ConfigError("config field '" + entry_path(id, "gate_params") +
                          "' must be an object");
      }
      d.gate_params = entry.at("gate_params");
    }
    if (entry.contains("schedule")) {
      const auto& sched = entry.at("schedule");
      if (!sched.is_object()) {
        throw ConfigError("config field '" + entry_path(id, "schedule") + "' must be an object");
      }
      d.schedule.p_start = schedule_num(sched, id, "p_start", d.schedule.p_start);
      d.schedule.p_end = schedule_num(sched, id, "p_end", d.schedule.p_end);
      d.schedule.ramp_fraction =
          schedule_num(sched, id, "ramp_fraction", d.schedule.ramp_fraction);
      if (d.schedule.p_start < 0.0 || d.schedule.p_start > 1.0 || d.schedule.p_end < 0.0 ||
          d.schedule.p_end > 1.0) {
        throw ConfigError("config field '" + entry_path(id, "schedule") +
                          "' probabilities must lie in [0, 1]");
      }
      if (d.schedule.p_end < d.schedule.p_start) {
        throw ConfigError("config field '" + entry_path(id, "schedule") +
                          "' must ramp upward (p_end >= p_start)");
      }
      if (d.schedule.ramp_fraction <= 0.0 || d.schedule.ramp_fraction > 1.0) {
        throw ConfigError("config field '" + entry_path(id, "schedule.ramp_fraction") +
                          "' must lie in (0, 1]");
      }
    }
    decls.push_back(std::move(d));
  }
  return decls;
}

ConstraintSet ConstraintSet::bind(const std::vector<ConstraintDecl>& decls,
                                  const envs::ConstraintRegistry& registry) {
  ConstraintSet set;
  set.bound_.reserve(decls.size());
  for (const auto& d : decls) {
    BoundConstraint b;
    b.spec = d.spec;
    b.schedule = d.schedule;

    auto fn_it = registry.violations.find(d.spec.violation_fn);
    if (fn_it == registry.violations.end()) {
      throw ConfigError("constraint '" + d.spec.id + "': unknown violation function '" +
                        d.spec.violation_fn + "'");
    }
    try {
      b.fn = fn_it->second(d.params);
    } catch (const ConfigError& e) {
      throw ConfigError("constraint '" + d.spec.id + "': " + e.what());
    }

    if (!d.spec.gate.empty()) {
      auto gate_it = registry.gates.find(d.spec.gate);
      if (gate_it == registry.gates.end()) {
        throw ConfigError("constraint '" + d.spec.id + "': unknown gate '" + d.spec.gate +
                          "'");
      }
      try {
        b.gate = gate_it->second(d.gate_params);
      } catch (const ConfigError& e) {
        throw ConfigError("constraint '" + d.spec.id + "' gate: " + e.what());
      }
    }
    set.bound_.push_back(std::move(b));
  }
  return set;
}

std::vector<std::string> ConstraintSet::ids() const {
  std::vector<std::string> out;
  out.reserve(bound_.size());
  for (const auto& b : bound_) out.push_back(b.spec.id);
  return out;
}

void ConstraintSet::evaluate_into(const envs::Transition& t,
                                  std::vector<ViolationRecord>& out) const {
  out.resize(bound_.size());
  for (std::size_t i = 0; i < bound_.size(); ++i) {
    const auto& b = bound_[i];
    ViolationRecord& rec = out[i];
    rec.active = b.gate ? b.gate(t) : true;
    rec.value = b.fn(t);
    if (!std::isfinite(rec.value)) {
      throw TrainingError("constraint '" + b.spec.id + "' produced a non-finite value");
    }
    rec.positive = rec.active ? std::max(0.0, rec.value) : 0.0;
  }
}

std::vector<ViolationRecord> ConstraintSet::evaluate(const envs::Transition& t) const {
  std::vector<ViolationRecord> out;
  evaluate_into(t, out);
  return out;
}

std::vector<double> ConstraintSet::p_maxes(int epoch, int total_epochs) const {
  std::vector<double> out;
  out.reserve(bound_.size());
  for (const auto& b : bound_) {
    out.push_back(p_max(b.spec, b.schedule, epoch, total_epochs));
  }
  return out;
}

}  // namespace catrl::constraints
