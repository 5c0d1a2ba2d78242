#include "orthomads/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace orthomads {
namespace {

RunResult finish(Evaluator& evaluator) {
  RunResult r;
  r.best = evaluator.best();
  r.trace = std::move(evaluator.trace());
  r.trace.reason = TerminalReason::budget_exhausted;
  return r;
}

}  // namespace

BaselineMethod parse_baseline_method(std::string_view name) {
  if (name == "grid") return BaselineMethod::grid;
  if (name == "random") return BaselineMethod::random;
  if (name == "sa") return BaselineMethod::sa;
  throw ConfigError("unknown baseline method '" + std::string(name) + "'");
}

void BaselineConfig::validate() const {
  bounds.validate();
  if (budget < 1) throw ConfigError("baseline: budget must be at least 1");
  if (!grid_axes.empty() && grid_axes.size() != bounds.dimension()) {
    throw ConfigError("baseline: one grid axis per dimension is required");
  }
  if (grid_points_per_axis < 1) throw ConfigError("baseline: grid needs at least one point per axis");
  if (!(sa_t0 > 0.0)) throw ConfigError("baseline: sa_t0 must be positive");
  if (!(sa_cooling > 0.0 && sa_cooling < 1.0)) throw ConfigError("baseline: sa_cooling must lie in (0, 1)");
  if (!x0.empty() && (x0.size() != bounds.dimension() || !bounds.contains(x0))) {
    throw ConfigError("baseline: x0 must lie inside the bounds");
  }
}

std::vector<std::vector<double>> preset_grid_axes() {
  std::vector<double> axis{1.0};
  for (int k = 1; k <= 9; ++k) axis.push_back(10.0 * k);
  return {axis, axis};
}

std::vector<double> even_axis(double lo, double hi, std::size_t n) {
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return v;
}

RunResult grid_search(const Objective& objective, const BaselineConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.bounds.dimension();
  std::vector<std::vector<double>> axes = cfg.grid_axes;
  if (axes.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      axes.push_back(even_axis(cfg.bounds.lower[j], cfg.bounds.upper[j], cfg.grid_points_per_axis));
    }
  }
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.empty()) throw ConfigError("grid: empty axis");
    total *= a.size();
  }
  if (total > cfg.budget) throw ConfigError("grid: " + std::to_string(total) + " points exceed the budget");

  std::vector<Point> points;
  points.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Point p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = axes[j][idx[j]];
    points.push_back(std::move(p));
    for (std::size_t j = n; j-- > 0;) {
      if (++idx[j] < axes[j].size()) break;
      idx[j] = 0;
    }
  }
  Evaluator evaluator(objective, cfg.bounds, cfg.budget, threads_from_environment());
  evaluator.evaluate_batch(points, Stage::baseline);
  return finish(evaluator);
}

RunResult random_search(const Objective& objective, const BaselineConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.bounds.dimension();
  Evaluator evaluator(objective, cfg.bounds, cfg.budget);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto sample_box = [&](const Point& lo, const Point& hi, std::size_t count) {
    for (std::size_t s = 0; s < count && evaluator.remaining() > 0; ++s) {
      Point p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = lo[j] + (hi[j] - lo[j]) * unit(rng);
      evaluator.evaluate(p, Stage::baseline);
    }
  };

  sample_box(cfg.bounds.lower, cfg.bounds.upper, std::max<std::size_t>(1, cfg.budget / 2));
  Point width = cfg.bounds.width();
  for (std::size_t round = 0; round < cfg.rs_refine_rounds; ++round) {
    const std::size_t share = evaluator.remaining() / (cfg.rs_refine_rounds - round);
    for (double& w : width) w *= 0.5;
    const Point center = evaluator.best().point;
    Point lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::max(cfg.bounds.lower[j], center[j] - 0.5 * width[j]);
      hi[j] = std::min(cfg.bounds.upper[j], center[j] + 0.5 * width[j]);
    }
    sample_box(lo, hi, share);
  }
  return finish(evaluator);
}

bool metropolis_accept(double delta, double temperature, double u) {
  if (delta <= 0.0) return true;
  if (!(temperature > 0.0) || !std::isfinite(delta)) return false;
  return u < std::exp(-delta / temperature);
}

RunResult simulated_annealing(const Objective& objective, const BaselineConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.bounds.dimension();
  const Point width = cfg.bounds.width();
  Evaluator evaluator(objective, cfg.bounds, cfg.budget);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Point x = cfg.x0.empty() ? cfg.bounds.midpoint() : cfg.x0;
  double fx = evaluator.evaluate(x, Stage::baseline);
  double t = cfg.sa_t0;
  for (std::size_t step = 0; step < 10 * cfg.budget && evaluator.remaining() > 0; ++step) {
    Point y(n);
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = std::clamp(x[j] + gauss(rng) * t * width[j], cfg.bounds.lower[j], cfg.bounds.upper[j]);
    }
    const std::size_t before = evaluator.evaluations();
    const double fy = evaluator.evaluate(y, Stage::baseline);
    if (metropolis_accept(fy - fx, t, unit(rng))) {
      x = std::move(y);
      fx = fy;
    }
    if (evaluator.evaluations() > before) t *= cfg.sa_cooling;
  }
  return finish(evaluator);
}

RunResult run_baseline(const Objective& objective, const BaselineConfig& cfg) {
  switch (cfg.method) {
    case BaselineMethod::grid: return grid_search(objective, cfg);
    case BaselineMethod::random: return random_search(objective, cfg);
    case BaselineMethod::sa: return simulated_annealing(objective, cfg);
  }
  throw ConfigError("unknown baseline method");
}

}  // namespace orthomads
