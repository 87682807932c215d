#include "catrl/harness/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "catrl/envs/pendulum.hpp"
#include "catrl/envs/point_mass.hpp"

namespace catrl::harness {

namespace {

nlohmann::json default_constraints_for(const nlohmann::json& env_section,
                                       envs::TaskMode mode) {
  const std::string name = env_section.value("name", "");
  if (name == "pendulum") return envs::pendulum_default_constraints(mode);
  if (name == "point_mass") return envs::point_mass_default_constraints(mode);
  return nlohmann::json::object();
}

std::uint64_t parse_seed(const nlohmann::json& run) {
  if (!run.contains("seed")) return 0;
  const auto& s = run.at("seed");
  if (s.is_number_unsigned()) return s.get<std::uint64_t>();
  if (s.is_number_integer() && s.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(s.get<std::int64_t>());
  }
  throw ConfigError("config field 'run.seed' must be a non-negative integer");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(nlohmann::json root) {
  if (!root.is_object()) {
    throw ConfigError("config document must be an object");
  }
  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string& key = it.key();
    if (key != "env" && key != "constraints" && key != "algo" && key != "variant" &&
        key != "run") {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  if (!root.contains("env")) {
    throw ConfigError("config section 'env' is required");
  }

  ExperimentConfig cfg;
  cfg.env = root.at("env");
  if (!cfg.env.is_object()) {
    throw ConfigError("config section 'env' must be an object");
  }

  cfg.task_mode = envs::TaskMode::Reward;
  if (cfg.env.contains("task_mode")) {
    if (!cfg.env.at("task_mode").is_string()) {
      throw ConfigError("config field 'env.task_mode' must be a string");
    }
    cfg.task_mode = envs::task_mode_from_string(cfg.env.at("task_mode").get<std::string>());
  }

  // validate env parameters eagerly so bad configs fail before any output
  const auto probe = envs::make_environment(cfg.env, cfg.task_mode);

  if (!root.contains("constraints")) {
    root["constraints"] = default_constraints_for(cfg.env, cfg.task_mode);
  }
  cfg.constraints = constraints::parse_constraint_decls(root.at("constraints"));

  cfg.hyper = algo::PpoHyper::from_json(root.contains("algo") ? root.at("algo")
                                                              : nlohmann::json());

  if (!root.contains("variant")) {
    root["variant"] = {{"name", "cat"}};
  }
  cfg.variant = baselines::VariantConfig::from_json(root.at("variant"));

  // resolve constraint functions (and the variant's rewiring of them) now,
  // so unknown names and missing limits fail at load time with field paths
  (void)constraints::ConstraintSet::bind(cfg.constraints, probe->registry());
  const auto wired = baselines::apply_variant(cfg.variant, cfg.constraints);
  (void)constraints::ConstraintSet::bind(wired.decls, probe->registry());

  if (!root.contains("run")) root["run"] = nlohmann::json::object();
  auto& run = root.at("run");
  if (!run.is_object()) {
    throw ConfigError("config section 'run' must be an object");
  }
  cfg.seed = parse_seed(run);
  if (!run.contains("seed")) run["seed"] = cfg.seed;
  if (run.contains("output_dir")) {
    if (!run.at("output_dir").is_string()) {
      throw ConfigError("config field 'run.output_dir' must be a string");
    }
    cfg.output_dir = run.at("output_dir").get<std::string>();
  } else {
    run["output_dir"] = cfg.output_dir;
  }
  if (run.contains("eval_episodes")) {
    if (!run.at("eval_episodes").is_number_integer() ||
        run.at("eval_episodes").get<int>() < 1) {
      throw ConfigError("config field 'run.eval_episodes' must be a positive integer");
    }
    cfg.eval_episodes = run.at("eval_episodes").get<int>();
  } else {
    run["eval_episodes"] = cfg.eval_episodes;
  }

  cfg.resolved = std::move(root);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  for (const auto& o : overrides) apply_override(root, o);
  return parse(std::move(root));
}

void set_by_path(nlohmann::json& root, const std::string& path, nlohmann::json value) {
  nlohmann::json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos
                                                   ? std::string::npos
                                                   : dot - start);
    if (key.empty()) {
      throw ConfigError("config path '" + path + "' has an empty segment");
    }
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->contains(key)) (*node)[key] = nlohmann::json::object();
    nlohmann::json& next = (*node)[key];
    if (!next.is_object()) {
      throw ConfigError("config path '" + path + "' descends into non-object '" + key +
                        "'");
    }
    node = &next;
    start = dot + 1;
  }
}

void apply_override(nlohmann::json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form path=value");
  }
  std::string path = assignment.substr(0, eq);
  const std::string raw_value = assignment.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw_value);
  } catch (const nlohmann::json::parse_error&) {
    value = raw_value;  // bare strings need no quoting
  }

  if (path == "variant" && value.is_string()) path = "variant.name";
  set_by_path(root, path, std::move(value));
}

std::string resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path p(output_dir);
  if (p.is_absolute()) return p.string();
  const char* root = std::getenv("CATRL_OUTPUT_ROOT");
  if (root == nullptr || *root == '\0') return p.string();
  return (std::filesystem::path(root) / p).string();
}

}  // namespace catrl::harness
