#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace catrl {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

/// Bad configuration (unknown ids, missing fields, shape mismatches at setup).
/// Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure during training or evaluation (non-finite losses, env faults).
/// Maps to CLI exit code 2.
struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

/// SplitMix64 step, used to derive independent seed streams from one run seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream seed for (run_seed, stream_id). Every RNG in a run
/// is seeded through this so that the single run seed governs all randomness.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream_id) {
  std::uint64_t s = run_seed ^ (0x51a84full + stream_id * 0x1000193ull);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t run_seed, std::uint64_t stream_id) {
  return Rng(derive_seed(run_seed, stream_id));
}

}  // namespace catrl
