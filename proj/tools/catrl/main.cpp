#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catrl/harness/checkpoint.hpp"
#include "catrl/harness/compare.hpp"
#include "catrl/harness/config.hpp"
#include "catrl/harness/export.hpp"
#include "catrl/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace catrl;

namespace {

int cmd_train(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = harness::ExperimentConfig::load(config_path, sets);
  const auto artifacts = harness::run_experiment(cfg);
  std::cout << "run complete: " << artifacts.dir << '\n'
            << "  mean return   " << artifacts.eval.mean_return << '\n'
            << "  success rate  " << artifacts.eval.success_rate << '\n';
  for (std::size_t k = 0; k < artifacts.eval.constraint_ids.size(); ++k) {
    std::cout << "  violation " << artifacts.eval.constraint_ids[k] << "  "
              << artifacts.eval.violation_fraction[k] << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& run_dir, int episodes, const std::string& out_path,
             const std::string& log_path, const std::vector<std::string>& sets) {
  const fs::path dir(run_dir);
  const auto cfg = harness::ExperimentConfig::load((dir / "config.json").string(), sets);
  const auto ckpt = harness::load_checkpoint((dir / "checkpoint.bin").string());

  auto probe = envs::make_environment(cfg.env, cfg.task_mode);
  const auto cset = constraints::ConstraintSet::bind(cfg.constraints, probe->registry());
  const int n = episodes > 0 ? episodes : cfg.eval_episodes;
  const auto report = harness::evaluate_policy(ckpt.net, cfg.env, cfg.task_mode, cset, n,
                                               cfg.seed, log_path);
  const std::string rendered = report.to_json().dump(2);
  if (out_path.empty()) {
    std::cout << rendered << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw TrainingError("cannot write evaluation report to '" + out_path + "'");
    out << rendered << '\n';
    std::cout << "evaluation written to " << out_path << '\n';
  }
  return 0;
}

int cmd_compare(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = harness::CompareConfig::load(config_path, sets);
  const auto table = harness::run_compare(cfg);
  std::cout << table.render_text();
  bool any_failed = false;
  for (const auto& res : table.results) any_failed |= !res.ok;
  if (any_failed) {
    std::cerr << "warning: some runs failed; aggregates cover the survivors\n";
  }
  return 0;
}

int cmd_export(const std::string& run_dir, std::string out_dir) {
  const fs::path metrics = fs::path(run_dir) / "metrics.csv";
  if (out_dir.empty()) out_dir = (fs::path(run_dir) / "export").string();
  const auto files = harness::export_plotdata(metrics.string(), out_dir);
  std::cout << "wrote " << files.size() << " series files to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraints-as-terminations: train, evaluate and compare policies"};
  app.require_subcommand(1);

  std::vector<std::string> sets;

  auto* train = app.add_subcommand("train", "Train one policy from a config file");
  std::string train_config;
  train->add_option("--config", train_config, "Experiment config (JSON)")->required();
  train->add_option("--set", sets, "Override a config key: dotted.path=value");

  auto* eval = app.add_subcommand("eval", "Evaluate a finished run's checkpoint");
  std::string eval_dir, eval_out, eval_log;
  int eval_episodes = 0;
  eval->add_option("--run-dir", eval_dir, "Run directory with config.json + checkpoint.bin")
      ->required();
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes (default: config)");
  eval->add_option("--out", eval_out, "Write the report here instead of stdout");
  eval->add_option("--log", eval_log, "Also write a per-step transition log (CSV)");
  eval->add_option("--set", sets, "Override a config key: dotted.path=value");

  auto* compare = app.add_subcommand("compare", "Run a multi-seed variant comparison");
  std::string compare_config;
  compare->add_option("--config", compare_config, "Compare config (JSON)")->required();
  compare->add_option("--set", sets, "Override a compare-config key: dotted.path=value");

  auto* exp = app.add_subcommand("export", "Split metrics.csv into per-metric series");
  std::string export_dir, export_out;
  exp->add_option("--run-dir", export_dir, "Run directory with metrics.csv")->required();
  exp->add_option("--out", export_out, "Series directory (default: <run-dir>/export)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train) return cmd_train(train_config, sets);
    if (*eval) return cmd_eval(eval_dir, eval_episodes, eval_out, eval_log, sets);
    if (*compare) return cmd_compare(compare_config, sets);
    if (*exp) return cmd_export(export_dir, export_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
