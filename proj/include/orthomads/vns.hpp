#pragma once

// Variable Neighborhood Search stage: shaking on a coarse mesh, a
// coordinate descent on the fine mesh, and the perturbation order update.

#include <cstddef>
#include <random>
#include <span>

#include "orthomads/evaluator.hpp"
#include "orthomads/mesh.hpp"
#include "orthomads/types.hpp"

namespace orthomads {

struct VnsConfig {
  Point coarse_mesh;             // Delta_v; empty means (U - L) / 10
  double rho = 0.0;              // proximity threshold; 0 means min(delta_min)
  double budget_fraction = 0.25; // xi: share of max_evals VNS may spend
  unsigned initial_order = 1;    // xi_0
  unsigned order_increment = 1;

  void validate(std::size_t n) const;
};

struct VnsState {
  unsigned order = 1;
  std::size_t evals_used = 0;
};

using Rng = std::mt19937_64;

/// x + Delta_v * z for z uniform on the integer shell ||z||_inf == order,
/// pulled inward along the coarse mesh so the result stays in bounds.
Point shake(std::span<const double> x, unsigned order, std::span<const double> coarse_mesh,
            const Bounds& bounds, Rng& rng);

/// Fresh evaluations VNS may still spend.
struct VnsBudget {
  std::size_t used = 0;
  std::size_t cap = 0;
  bool exhausted() const { return used >= cap; }
};

/// Greedy coordinate descent from `start` on the mesh around `center`, with
/// steps m * delta_j. Starts at m = 1, doubles m after a move, halves it
/// after a full failed sweep, stops after failing at m = 1. Aborts when a candidate is within
/// rho (L-inf) of one of the first `known` trace records.
Incumbent descent(Evaluator& evaluator, const Incumbent& start, std::span<const double> center,
                  const MeshState& state, double rho, std::size_t known, VnsBudget& budget);

/// Order update after an iteration; returns whether VNS runs next iteration.
bool vns_trigger(VnsState& state, const VnsConfig& cfg, std::size_t max_evals,
                 bool last_iteration_failed);

/// ceil(budget_fraction * max_evals).
std::size_t vns_eval_cap(const VnsConfig& cfg, std::size_t max_evals);

}  // namespace orthomads
