#include <doctest.h>

#include <cmath>

#include "orthomads/baselines.hpp"

using namespace orthomads;

namespace {

const Bounds kBox{{0.01, 0.01}, {100.01, 100.01}};

double sphere(std::span<const double> x) {
  return (x[0] - 50.0) * (x[0] - 50.0) + (x[1] - 50.0) * (x[1] - 50.0);
}

BaselineConfig config(BaselineMethod m, std::size_t budget, std::uint64_t seed) {
  BaselineConfig c;
  c.method = m;
  c.bounds = kBox;
  c.budget = budget;
  c.seed = seed;
  return c;
}

void check_bounds_and_budget(const RunResult& r, const BaselineConfig& c) {
  CHECK(r.trace.records.size() <= c.budget);
  for (const auto& rec : r.trace.records) {
    CHECK(c.bounds.contains(rec.point));
    CHECK(rec.stage == Stage::baseline);
  }
}

}  // namespace

TEST_CASE("grid: 10 x 10 on [0, 100]^2 finds the point nearest the middle") {
  auto c = config(BaselineMethod::grid, 100, 0);
  c.bounds = Bounds{{0.0, 0.0}, {100.0, 100.0}};
  const auto r = grid_search(
      [](std::span<const double> x) { return (x[0] - 50) * (x[0] - 50) + (x[1] - 50) * (x[1] - 50); }, c);
  CHECK(r.trace.records.size() == 100);
  // Axis values are 100 k / 9; 44.4 and 55.6 are equally near 50.
  CHECK(std::abs(r.best.point[0] - 50.0) == doctest::Approx(50.0 / 9.0));
  CHECK(std::abs(r.best.point[1] - 50.0) == doctest::Approx(50.0 / 9.0));
  CHECK(r.trace.records.front().point == Point{0.0, 0.0});
  CHECK(r.trace.records.back().point == Point{100.0, 100.0});
  CHECK(r.trace.records[1].point == Point{0.0, 100.0 / 9.0});
}

TEST_CASE("grid: 1 x 1 evaluates only the lower bound; oversized grids are rejected") {
  auto c = config(BaselineMethod::grid, 100, 0);
  c.grid_points_per_axis = 1;
  const auto r = grid_search(sphere, c);
  REQUIRE(r.trace.records.size() == 1);
  CHECK(r.trace.records[0].point == kBox.lower);
  c.grid_points_per_axis = 11;
  CHECK_THROWS_AS(grid_search(sphere, c), ConfigError);
}

TEST_CASE("grid: preset axes give exactly 100 evaluations") {
  auto c = config(BaselineMethod::grid, 100, 0);
  c.grid_axes = preset_grid_axes();
  const auto r = grid_search(sphere, c);
  CHECK(r.trace.records.size() == 100);
  CHECK(r.best.point == Point{50.0, 50.0});
  CHECK(preset_grid_axes()[0] == std::vector<double>{1, 10, 20, 30, 40, 50, 60, 70, 80, 90});
}

TEST_CASE("random search: single sample at budget 1, determinism, bounds") {
  const auto one = random_search(sphere, config(BaselineMethod::random, 1, 3));
  CHECK(one.trace.records.size() == 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = config(BaselineMethod::random, 100, seed);
    const auto a = random_search(sphere, c);
    const auto b = random_search(sphere, c);
    check_bounds_and_budget(a, c);
    CHECK(a.trace.records.size() == 100);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) CHECK(a.trace.records[i].point == b.trace.records[i].point);
  }
}

TEST_CASE("random search improves during refinement on most seeds") {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = random_search(sphere, config(BaselineMethod::random, 100, seed));
    const double after_stage_one = r.trace.records[49].best_so_far;
    improved += r.best.value < after_stage_one;
  }
  CHECK(improved >= 45);
}

TEST_CASE("metropolis rule") {
  CHECK(metropolis_accept(-1.0, 1.0, 0.999));
  CHECK(metropolis_accept(0.0, 1e-300, 0.999));
  CHECK(metropolis_accept(0.0, 1.0, 0.0));
  CHECK_FALSE(metropolis_accept(1e-6, 0.0, 0.0));
  CHECK_FALSE(metropolis_accept(INFINITY, 1.0, 0.0));
  CHECK(metropolis_accept(1.0, 1.0, std::exp(-1.0) - 1e-9));
  CHECK_FALSE(metropolis_accept(1.0, 1.0, std::exp(-1.0) + 1e-9));
}

TEST_CASE("annealing: bounds, budget, determinism, accuracy on the sphere") {
  int close = 0;
  const double diagonal = std::sqrt(2.0) * 100.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = config(BaselineMethod::sa, 200, seed);
    const auto r = simulated_annealing(sphere, c);
    check_bounds_and_budget(r, c);
    CHECK(r.trace.records.size() == 200);
    const double dist = std::hypot(r.best.point[0] - 50.0, r.best.point[1] - 50.0);
    close += dist <= 0.05 * diagonal;
    if (seed < 5) {
      const auto again = simulated_annealing(sphere, c);
      CHECK(again.best.point == r.best.point);
    }
  }
  CHECK(close >= 40);
}

TEST_CASE("annealing starts from x0 and reports the best ever seen") {
  auto c = config(BaselineMethod::sa, 50, 1);
  c.x0 = {10.0, 90.0};
  const auto r = simulated_annealing(sphere, c);
  CHECK(r.trace.records.front().point == Point{10.0, 90.0});
  double m = INFINITY;
  for (const auto& rec : r.trace.records) m = std::min(m, rec.value);
  CHECK(r.best.value == m);
}

TEST_CASE("config validation") {
  auto c = config(BaselineMethod::sa, 0, 1);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(BaselineMethod::sa, 10, 1);
  c.sa_cooling = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(BaselineMethod::grid, 10, 1);
  c.grid_axes = {{1.0}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_baseline_method("sa") == BaselineMethod::sa);
  CHECK_THROWS_AS(parse_baseline_method("bayes"), ConfigError);
}
