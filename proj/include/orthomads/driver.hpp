#pragma once

// Ortho-MADS main loop with optional VNS and Nelder-Mead search stages and a
// per-dimension minimum mesh size stop.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "orthomads/evaluator.hpp"
#include "orthomads/mesh.hpp"
#include "orthomads/nelder_mead.hpp"
#include "orthomads/types.hpp"
#include "orthomads/vns.hpp"

namespace orthomads {

struct TunerConfig {
  Bounds bounds;
  Point x0;
  Point min_mesh;              // one value or one per dimension
  std::size_t max_evals = 0;   // 0 means 100 * n
  std::uint64_t seed = 0;
  double tau = 0.5;
  Point initial_frame;         // empty means (U - L) / 10
  std::optional<VnsConfig> vns;
  bool nm_enabled = false;
  NmConfig nm;
  bool opportunistic = false;
  std::optional<double> target;  // stop once the best value is <= target
  unsigned threads = 1;

  /// Throws ConfigError; called by optimize before any evaluation.
  void validate() const;
  std::size_t effective_max_evals() const;
};

struct RunResult {
  Incumbent best;
  RunTrace trace;
  std::size_t iterations = 0;
};

struct PollOutcome {
  bool improved = false;
  Incumbent point;
};

/// Polls incumbent + delta * d over the Ortho directions of `iteration`.
/// Non-opportunistic polls evaluate every direction and keep the first
/// argmin; opportunistic polls stop at the first strict improvement.
PollOutcome poll_step(Evaluator& evaluator, const Incumbent& incumbent, const MeshState& state,
                      std::uint64_t iteration, std::uint64_t seed, bool opportunistic);

RunResult optimize(const TunerConfig& config, const Objective& objective);

}  // namespace orthomads
