#pragma once

#include <string>

#include "catrl/harness/config.hpp"
#include "catrl/harness/eval.hpp"

namespace catrl::harness {

struct RunArtifacts {
  std::string dir;  // resolved output directory
  EvalReport eval;
};

/// Executes one experiment end to end: writes the resolved config, trains
/// with per-epoch metrics rows, saves the final checkpoint, evaluates the
/// mean policy against the originally declared constraints, and writes the
/// evaluation report plus its transition log. On any failure a FAILED
/// marker with the error message is left in the output directory and the
/// exception is rethrown; metrics rows written so far are kept.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

}  // namespace catrl::harness
