#include "catrl/harness/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "catrl/harness/metrics.hpp"

namespace catrl::harness {

double EvalReport::violation_fraction_of(const std::string& id) const {
  for (std::size_t i = 0; i < constraint_ids.size(); ++i) {
    if (constraint_ids[i] == id) return violation_fraction[i];
  }
  throw ConfigError("evaluation report has no constraint '" + id + "'");
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["episodes"] = episodes;
  j["steps"] = steps;
  j["mean_return"] = mean_return;
  if (std::isnan(return_std)) {
    j["return_std"] = nullptr;
  } else {
    j["return_std"] = return_std;
  }
  j["success_rate"] = success_rate;
  j["episode_returns"] = episode_returns;
  j["successes"] = successes;
  nlohmann::json frac = nlohmann::json::object();
  for (std::size_t i = 0; i < constraint_ids.size(); ++i) {
    frac[constraint_ids[i]] = violation_fraction[i];
  }
  j["violation_fraction"] = frac;
  nlohmann::json aux = nlohmann::json::object();
  for (const auto& [key, mean] : aux_mean) {
    aux[key] = {{"mean", mean}, {"p95", aux_p95.at(key)}};
  }
  j["aux"] = aux;
  return j;
}

double percentile95(std::vector<double> samples) {
  if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(samples.begin(), samples.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(samples.size())));
  return samples[std::max<std::size_t>(rank, 1) - 1];
}

EvalReport evaluate_policy(const nn::PolicyValueNet& net, const nlohmann::json& env_cfg,
                           envs::TaskMode mode, const constraints::ConstraintSet& cset,
                           int episodes, std::uint64_t run_seed,
                           const std::string& transition_log_path) {
  if (episodes < 1) throw ConfigError("evaluation needs at least one episode");
  auto env = envs::make_environment(env_cfg, mode);
  if (env->observation_dim() != net.obs_dim() || env->action_dim() != net.act_dim()) {
    throw ConfigError(
        "checkpoint is incompatible with the environment: network expects " +
        std::to_string(net.obs_dim()) + "/" + std::to_string(net.act_dim()) +
        " (obs/action), environment provides " + std::to_string(env->observation_dim()) +
        "/" + std::to_string(env->action_dim()));
  }
  env->seed(derive_seed(run_seed, kEvalStream));

  std::ofstream log;
  if (!transition_log_path.empty()) {
    log.open(transition_log_path, std::ios::out | std::ios::trunc);
    if (!log) {
      throw TrainingError("cannot open transition log '" + transition_log_path + "'");
    }
    log << "episode,step,reward";
    for (const auto& id : cset.ids()) log << ",value_" << id << ",active_" << id;
    log << '\n';
  }

  EvalReport report;
  report.episodes = episodes;
  report.constraint_ids = cset.ids();
  report.violation_fraction.assign(report.constraint_ids.size(), 0.0);
  std::vector<long long> violation_steps(report.constraint_ids.size(), 0);
  std::map<std::string, std::vector<double>> aux;
  std::vector<constraints::ViolationRecord> records;

  for (int ep = 0; ep < episodes; ++ep) {
    env->reset();
    std::vector<envs::Transition> episode;
    episode.reserve(static_cast<std::size_t>(env->episode_length()));
    double ep_return = 0.0;
    for (int step = 0; step < env->episode_length(); ++step) {
      const VectorXd action = nn::forward1(net.actor, env->observation());
      envs::Transition t = env->step(action);
      cset.evaluate_into(t, records);
      for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].active && records[k].value > 0.0) ++violation_steps[k];
      }
      if (log.is_open()) {
        log << ep << ',' << step << ',' << format_double(t.reward);
        for (const auto& r : records) {
          log << ',' << format_double(r.value) << ',' << (r.active ? 1 : 0);
        }
        log << '\n';
      }
      env->eval_stats(t, aux);
      ep_return += t.reward;
      ++report.steps;
      episode.push_back(std::move(t));
    }
    report.episode_returns.push_back(ep_return);
    report.successes.push_back(env->episode_success(episode) ? 1 : 0);
  }

  double sum = 0.0;
  for (double r : report.episode_returns) sum += r;
  report.mean_return = sum / episodes;
  if (episodes > 1) {
    double sq = 0.0;
    for (double r : report.episode_returns) {
      sq += (r - report.mean_return) * (r - report.mean_return);
    }
    report.return_std = std::sqrt(sq / (episodes - 1));
  } else {
    report.return_std = std::numeric_limits<double>::quiet_NaN();
  }
  int succ = 0;
  for (int s : report.successes) succ += s;
  report.success_rate = static_cast<double>(succ) / episodes;
  for (std::size_t k = 0; k < violation_steps.size(); ++k) {
    report.violation_fraction[k] =
        static_cast<double>(violation_steps[k]) / static_cast<double>(report.steps);
  }
  for (auto& [key, samples] : aux) {
    double s = 0.0;
    for (double v : samples) s += v;
    report.aux_mean[key] = s / static_cast<double>(samples.size());
    report.aux_p95[key] = percentile95(samples);
  }
  return report;
}

}  // namespace catrl::harness
