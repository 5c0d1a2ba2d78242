#pragma once

// Comparison tuners: grid search, random search with box refinement and
// simulated annealing. All share the evaluator's barrier, budget and trace.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "orthomads/driver.hpp"

namespace orthomads {

enum class BaselineMethod { grid, random, sa };

BaselineMethod parse_baseline_method(std::string_view name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::grid;
  Bounds bounds;
  std::size_t budget = 100;
  std::uint64_t seed = 0;
  Point x0;  // annealing start; empty means the box midpoint
  std::size_t grid_points_per_axis = 10;
  // Explicit axis values (one list per dimension); overrides the even grid.
  std::vector<std::vector<double>> grid_axes;
  std::size_t rs_refine_rounds = 3;
  double sa_t0 = 1.0;
  double sa_cooling = 0.95;

  void validate() const;
};

/// C, gamma in {1, 10, 20, ..., 90}: 100 points.
std::vector<std::vector<double>> preset_grid_axes();

/// n evenly spaced values from lo to hi inclusive; n == 1 gives {lo}.
std::vector<double> even_axis(double lo, double hi, std::size_t n);

/// Cartesian product in lexicographic order (first axis outermost). Strict
/// improvement keeps the first point among equal values.
RunResult grid_search(const Objective& objective, const BaselineConfig& cfg);

/// max(1, budget / 2) uniform samples, then rs_refine_rounds rounds, each in
/// a box of half the previous width around the best point (clipped to the
/// bounds) and with an equal share of what remains.
RunResult random_search(const Objective& objective, const BaselineConfig& cfg);

/// Gaussian proposals with scale T * (U - L), Metropolis acceptance and
/// T <- cooling * T per evaluation. Returns the best point ever seen.
RunResult simulated_annealing(const Objective& objective, const BaselineConfig& cfg);

/// Metropolis rule: accept when delta <= 0, else with probability
/// exp(-delta / T). `u` is a uniform draw in [0, 1).
bool metropolis_accept(double delta, double temperature, double u);

RunResult run_baseline(const Objective& objective, const BaselineConfig& cfg);

}  // namespace orthomads
