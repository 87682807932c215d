#include "catrl/harness/runner.hpp"

#include <filesystem>
#include <fstream>

#include "catrl/harness/checkpoint.hpp"
#include "catrl/harness/metrics.hpp"

namespace catrl::harness {

namespace fs = std::filesystem;

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  const fs::path dir = resolve_output_dir(cfg.output_dir);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "config.json");
    if (!out) {
      throw TrainingError("cannot write config to '" + dir.string() + "'");
    }
    out << cfg.resolved.dump(2) << '\n';
  }

  try {
    auto batch = envs::EnvBatch::create(cfg.env, cfg.task_mode, cfg.hyper.num_envs,
                                        cfg.seed);
    auto wired = baselines::apply_variant(cfg.variant, cfg.constraints);
    const auto& registry = batch.env(0).registry();
    const auto train_cset = constraints::ConstraintSet::bind(wired.decls, registry);

    algo::TrainSetup setup;
    setup.hyper = cfg.hyper;
    setup.termination = wired.termination;
    setup.penalty_weights = wired.penalty_weights;
    setup.run_seed = cfg.seed;

    algo::Trainer trainer(batch, train_cset, setup);
    MetricsWriter metrics((dir / "metrics.csv").string(), train_cset.ids());
    trainer.run([&](const algo::EpochRecord& rec) { metrics.append(rec); });

    Checkpoint ckpt{trainer.net(), trainer.updater().adam(),
                    trainer.termination_state()};
    save_checkpoint((dir / "checkpoint.bin").string(), ckpt);

    // evaluation always reports against the constraints as declared, not
    // the variant's rewiring of them
    const auto eval_cset = constraints::ConstraintSet::bind(cfg.constraints, registry);
    RunArtifacts artifacts;
    artifacts.dir = dir.string();
    artifacts.eval = evaluate_policy(trainer.net(), cfg.env, cfg.task_mode, eval_cset,
                                     cfg.eval_episodes, cfg.seed,
                                     (dir / "eval_transitions.csv").string());

    std::ofstream eval_out(dir / "eval.json");
    if (!eval_out) {
      throw TrainingError("cannot write evaluation report to '" + dir.string() + "'");
    }
    eval_out << artifacts.eval.to_json().dump(2) << '\n';
    return artifacts;
  } catch (const std::exception& e) {
    std::ofstream marker(dir / "FAILED");
    marker << e.what() << '\n';
    throw;
  }
}

}  // namespace catrl::harness
