#include "catrl/algo/hyper.hpp"

namespace catrl::algo {

namespace {

double num_field(const nlohmann::json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string("config field 'algo.") + key + "' must be a number");
  }
  return v.get<double>();
}

int int_field(const nlohmann::json& cfg, const char* key, int fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("config field 'algo.") + key + "' must be an integer");
  }
  return v.get<int>();
}

}  // namespace

PpoHyper PpoHyper::from_json(const nlohmann::json& cfg) {
  PpoHyper h;
  if (!cfg.is_object()) {
    if (cfg.is_null()) return h;
    throw ConfigError("config section 'algo' must be an object");
  }
  static const char* known[] = {
      "horizon",       "num_envs",      "epochs",        "mini_epochs",
      "minibatch_size", "gamma",        "lam",           "clip",
      "entropy_coef",  "critic_coef",   "learning_rate", "kl_threshold",
      "lr_min",        "lr_max",        "max_grad_norm", "tau_c",
      "c_max_floor",   "hidden",        "activation"};
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) {
      throw ConfigError("unknown config field 'algo." + key + "'");
    }
  }
  h.horizon = int_field(cfg, "horizon", h.horizon);
  h.num_envs = int_field(cfg, "num_envs", h.num_envs);
  h.epochs = int_field(cfg, "epochs", h.epochs);
  h.mini_epochs = int_field(cfg, "mini_epochs", h.mini_epochs);
  h.minibatch_size = int_field(cfg, "minibatch_size", h.minibatch_size);
  h.gamma = num_field(cfg, "gamma", h.gamma);
  h.lam = num_field(cfg, "lam", h.lam);
  h.clip = num_field(cfg, "clip", h.clip);
  h.entropy_coef = num_field(cfg, "entropy_coef", h.entropy_coef);
  h.critic_coef = num_field(cfg, "critic_coef", h.critic_coef);
  h.learning_rate = num_field(cfg, "learning_rate", h.learning_rate);
  h.kl_threshold = num_field(cfg, "kl_threshold", h.kl_threshold);
  h.lr_min = num_field(cfg, "lr_min", h.lr_min);
  h.lr_max = num_field(cfg, "lr_max", h.lr_max);
  h.max_grad_norm = num_field(cfg, "max_grad_norm", h.max_grad_norm);
  h.tau_c = num_field(cfg, "tau_c", h.tau_c);
  h.c_max_floor = num_field(cfg, "c_max_floor", h.c_max_floor);
  if (cfg.contains("hidden")) {
    const auto& hid = cfg.at("hidden");
    if (!hid.is_array() || hid.empty()) {
      throw ConfigError("config field 'algo.hidden' must be a non-empty array of integers");
    }
    h.hidden.clear();
    for (const auto& v : hid) {
      if (!v.is_number_integer() || v.get<int>() < 1) {
        throw ConfigError("config field 'algo.hidden' must contain positive integers");
      }
      h.hidden.push_back(v.get<int>());
    }
  }
  if (cfg.contains("activation")) {
    const auto& act = cfg.at("activation");
    if (!act.is_string()) {
      throw ConfigError("config field 'algo.activation' must be a string");
    }
    h.activation = nn::activation_from_string(act.get<std::string>());
  }
  h.validate();
  return h;
}

void PpoHyper::validate() const {
  if (horizon < 1) throw ConfigError("config field 'algo.horizon' must be at least 1");
  if (num_envs < 1) throw ConfigError("config field 'algo.num_envs' must be at least 1");
  if (epochs < 1) throw ConfigError("config field 'algo.epochs' must be at least 1");
  if (mini_epochs < 1) throw ConfigError("config field 'algo.mini_epochs' must be at least 1");
  if (minibatch_size < 1 || minibatch_size > batch_size()) {
    throw ConfigError(
        "config field 'algo.minibatch_size' must lie in [1, horizon * num_envs]");
  }
  if (gamma <= 0.0 || gamma > 1.0) {
    throw ConfigError("config field 'algo.gamma' must lie in (0, 1]");
  }
  if (lam < 0.0 || lam > 1.0) throw ConfigError("config field 'algo.lam' must lie in [0, 1]");
  if (clip <= 0.0) throw ConfigError("config field 'algo.clip' must be positive");
  if (entropy_coef < 0.0) throw ConfigError("config field 'algo.entropy_coef' must be non-negative");
  if (critic_coef <= 0.0) throw ConfigError("config field 'algo.critic_coef' must be positive");
  if (learning_rate <= 0.0) throw ConfigError("config field 'algo.learning_rate' must be positive");
  if (kl_threshold <= 0.0) throw ConfigError("config field 'algo.kl_threshold' must be positive");
  if (lr_min <= 0.0 || lr_max < lr_min) {
    throw ConfigError("config fields 'algo.lr_min'/'algo.lr_max' must satisfy 0 < lr_min <= lr_max");
  }
  if (max_grad_norm <= 0.0) {
    throw ConfigError("config field 'algo.max_grad_norm' must be positive");
  }
  if (tau_c < 0.0 || tau_c >= 1.0) {
    throw ConfigError("config field 'algo.tau_c' must lie in [0, 1)");
  }
  if (c_max_floor <= 0.0) {
    throw ConfigError("config field 'algo.c_max_floor' must be positive");
  }
}

}  // namespace catrl::algo
