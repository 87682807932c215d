#include "catrl/harness/compare.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "catrl/harness/config.hpp"
#include "catrl/harness/runner.hpp"

namespace catrl::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct MeanStd {
  double mean = kNan;
  double std = kNan;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return out;
}

nlohmann::json null_if_nan(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

CompareConfig CompareConfig::parse(const nlohmann::json& root) {
  if (!root.is_object()) {
    throw ConfigError("compare config document must be an object");
  }
  CompareConfig cfg;
  if (!root.contains("base") || !root.at("base").is_object()) {
    throw ConfigError("compare config needs a 'base' experiment section");
  }
  cfg.base = root.at("base");

  if (!root.contains("runs") || !root.at("runs").is_object() ||
      root.at("runs").size() < 2) {
    throw ConfigError("compare config needs a 'runs' object with at least two entries");
  }
  for (auto it = root.at("runs").begin(); it != root.at("runs").end(); ++it) {
    if (!it.value().is_object()) {
      throw ConfigError("compare config field 'runs." + it.key() +
                        "' must be an object of path overrides");
    }
    cfg.runs.emplace_back(it.key(), it.value());
  }

  if (!root.contains("seeds") || !root.at("seeds").is_array() ||
      root.at("seeds").size() < 2) {
    throw ConfigError("compare config needs a 'seeds' array with at least two seeds");
  }
  for (const auto& s : root.at("seeds")) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
      throw ConfigError("compare config seeds must be non-negative integers");
    }
    cfg.seeds.push_back(static_cast<std::uint64_t>(s.get<std::int64_t>()));
  }

  if (root.contains("workers")) {
    if (!root.at("workers").is_number_integer() || root.at("workers").get<int>() < 1) {
      throw ConfigError("compare config field 'workers' must be a positive integer");
    }
    cfg.workers = root.at("workers").get<int>();
  }
  if (root.contains("eval_episodes")) {
    if (!root.at("eval_episodes").is_number_integer() ||
        root.at("eval_episodes").get<int>() < 1) {
      throw ConfigError("compare config field 'eval_episodes' must be a positive integer");
    }
    cfg.eval_episodes = root.at("eval_episodes").get<int>();
  }
  if (root.contains("output_dir")) {
    if (!root.at("output_dir").is_string()) {
      throw ConfigError("compare config field 'output_dir' must be a string");
    }
    cfg.output_dir = root.at("output_dir").get<std::string>();
  }
  return cfg;
}

CompareConfig CompareConfig::load(const std::string& path,
                                  const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open compare config file '" + path + "'");
  }
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("compare config file '" + path + "' is not valid JSON: " +
                      e.what());
  }
  for (const auto& o : overrides) apply_override(root, o);
  return parse(root);
}

nlohmann::json CompareTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::object();
  for (const auto& row : rows) {
    nlohmann::json frac = nlohmann::json::object();
    for (std::size_t k = 0; k < row.constraint_ids.size(); ++k) {
      frac[row.constraint_ids[k]] = {{"mean", null_if_nan(row.violation_mean[k])},
                                     {"std", null_if_nan(row.violation_std[k])}};
    }
    rows_json[row.label] = {{"runs", row.runs},
                            {"failed", row.failed},
                            {"mean_return", null_if_nan(row.mean_return)},
                            {"return_std", null_if_nan(row.return_std)},
                            {"success_rate", null_if_nan(row.success_rate)},
                            {"success_std", null_if_nan(row.success_std)},
                            {"violation_fraction", frac}};
  }
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : results) {
    runs_json.push_back({{"label", r.label},
                         {"seed", r.seed},
                         {"ok", r.ok},
                         {"dir", r.dir},
                         {"error", r.error}});
  }
  return {{"rows", rows_json}, {"runs", runs_json}, {"warnings", warnings}};
}

std::string CompareTable::render_text() const {
  std::ostringstream out;
  out << std::left << std::setw(16) << "variant" << std::right << std::setw(10) << "runs"
      << std::setw(18) << "return" << std::setw(18) << "success" << '\n';
  auto pm = [](double mean, double std) {
    std::ostringstream cell;
    if (std::isnan(mean)) {
      cell << "-";
      return cell.str();
    }
    cell << std::fixed << std::setprecision(2) << mean;
    if (!std::isnan(std)) cell << " +- " << std::fixed << std::setprecision(2) << std;
    return cell.str();
  };
  for (const auto& row : rows) {
    std::ostringstream runs_cell;
    runs_cell << row.runs;
    if (row.failed > 0) runs_cell << " (" << row.failed << " failed)";
    out << std::left << std::setw(16) << row.label << std::right << std::setw(10)
        << runs_cell.str() << std::setw(18) << pm(row.mean_return, row.return_std)
        << std::setw(18) << pm(row.success_rate, row.success_std) << '\n';
    for (std::size_t k = 0; k < row.constraint_ids.size(); ++k) {
      out << "    violation " << std::left << std::setw(14) << row.constraint_ids[k]
          << std::right << std::setw(18)
          << pm(row.violation_mean[k], row.violation_std[k]) << '\n';
    }
  }
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

CompareTable run_compare(const CompareConfig& cfg) {
  const fs::path out_dir = resolve_output_dir(cfg.output_dir);
  fs::create_directories(out_dir);

  struct Job {
    std::size_t index;
    std::string label;
    nlohmann::json overrides;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& [label, overrides] : cfg.runs) {
    for (std::uint64_t seed : cfg.seeds) {
      jobs.push_back({jobs.size(), label, overrides, seed});
    }
  }

  std::vector<CompareRunResult> results(jobs.size());
  std::mutex queue_mutex;
  std::size_t next_job = 0;

  auto worker = [&] {
    while (true) {
      std::size_t mine;
      {
        std::lock_guard<std::mutex> lock(queue_mutex);
        if (next_job >= jobs.size()) return;
        mine = next_job++;
      }
      const Job& job = jobs[mine];
      CompareRunResult& res = results[job.index];
      res.label = job.label;
      res.seed = job.seed;
      const fs::path run_dir =
          out_dir / job.label / ("seed_" + std::to_string(job.seed));
      res.dir = run_dir.string();
      try {
        nlohmann::json doc = cfg.base;
        for (auto it = job.overrides.begin(); it != job.overrides.end(); ++it) {
          set_by_path(doc, it.key(), it.value());
        }
        set_by_path(doc, "run.seed", job.seed);
        set_by_path(doc, "run.output_dir", run_dir.string());
        set_by_path(doc, "run.eval_episodes", cfg.eval_episodes);
        const auto exp_cfg = ExperimentConfig::parse(std::move(doc));
        auto artifacts = run_experiment(exp_cfg);
        res.eval = std::move(artifacts.eval);
        res.ok = true;
      } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
      }
    }
  };

  const int workers = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CompareTable table;
  table.results = results;
  for (const auto& [label, overrides] : cfg.runs) {
    (void)overrides;
    CompareRow row;
    row.label = label;
    std::vector<double> returns, successes;
    std::vector<std::vector<double>> fractions;
    for (const auto& res : results) {
      if (res.label != label) continue;
      if (!res.ok) {
        ++row.failed;
        table.warnings.push_back("run '" + label + "' seed " + std::to_string(res.seed) +
                                 " failed: " + res.error);
        continue;
      }
      ++row.runs;
      returns.push_back(res.eval.mean_return);
      successes.push_back(res.eval.success_rate);
      if (row.constraint_ids.empty()) row.constraint_ids = res.eval.constraint_ids;
      if (res.eval.constraint_ids == row.constraint_ids) {
        fractions.push_back(res.eval.violation_fraction);
      } else {
        table.warnings.push_back("run '" + label +
                                 "' has a different constraint set; violations skipped");
      }
    }
    const auto ret = mean_std(returns);
    row.mean_return = ret.mean;
    row.return_std = ret.std;
    const auto suc = mean_std(successes);
    row.success_rate = suc.mean;
    row.success_std = suc.std;
    row.violation_mean.assign(row.constraint_ids.size(), kNan);
    row.violation_std.assign(row.constraint_ids.size(), kNan);
    for (std::size_t k = 0; k < row.constraint_ids.size(); ++k) {
      std::vector<double> vals;
      for (const auto& f : fractions) vals.push_back(f[k]);
      const auto ms = mean_std(vals);
      row.violation_mean[k] = ms.mean;
      row.violation_std[k] = ms.std;
    }
    table.rows.push_back(std::move(row));
  }

  {
    std::ofstream json_out(out_dir / "compare.json");
    json_out << table.to_json().dump(2) << '\n';
    std::ofstream text_out(out_dir / "compare.txt");
    text_out << table.render_text();
  }
  return table;
}

}  // namespace catrl::harness
