#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catrl/harness/eval.hpp"

namespace catrl::harness {

/// A comparison sweep: one base experiment config, a set of labelled
/// override bundles (one per table row), and the training seeds. Every
/// (label, seed) pair becomes an independent run in its own directory.
struct CompareConfig {
  nlohmann::json base;
  std::vector<std::pair<std::string, nlohmann::json>> runs;  // label -> {path: value}
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  int eval_episodes = 50;
  std::string output_dir = "compare";

  static CompareConfig parse(const nlohmann::json& root);
  static CompareConfig load(const std::string& path,
                            const std::vector<std::string>& overrides);
};

struct CompareRunResult {
  std::string label;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string dir;
  EvalReport eval;
};

/// Aggregate of one label over its surviving seeds. Dispersions are NaN
/// when fewer than two runs survive (serialised as null, not zero).
struct CompareRow {
  std::string label;
  int runs = 0;
  int failed = 0;
  double mean_return = 0.0, return_std = 0.0;
  double success_rate = 0.0, success_std = 0.0;
  std::vector<std::string> constraint_ids;
  std::vector<double> violation_mean, violation_std;
};

struct CompareTable {
  std::vector<CompareRow> rows;
  std::vector<CompareRunResult> results;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  std::string render_text() const;
};

/// Runs the sweep (possibly with several worker threads), aggregates the
/// per-run evaluation reports, and writes compare.json / compare.txt into
/// the sweep's output directory. Failed runs are recorded and skipped in
/// the aggregates with a warning.
CompareTable run_compare(const CompareConfig& cfg);

}  // namespace catrl::harness
