#pragma once

#include <string>

#include "catrl/constraints/termination.hpp"
#include "catrl/nn/adam.hpp"
#include "catrl/nn/policy.hpp"

namespace catrl::harness {

/// Final state of a training run: the network, the optimizer moments, and
/// the violation normaliser.
struct Checkpoint {
  nn::PolicyValueNet net;
  nn::AdamState adam;
  constraints::TerminationState termination;
};

/// Versioned binary container (magic + schema version + payload). Layouts
/// and activations are stored explicitly, so loading rebuilds the network
/// without the original config.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Throws ConfigError on a missing file, wrong magic, or unsupported
/// schema version.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace catrl::harness
