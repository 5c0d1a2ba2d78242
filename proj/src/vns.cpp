#include "orthomads/vns.hpp"

#include <algorithm>
#include <cmath>

namespace orthomads {

void VnsConfig::validate(std::size_t n) const {
  if (!coarse_mesh.empty()) {
    if (coarse_mesh.size() != n) throw ConfigError("vns: coarse mesh has the wrong dimension");
    for (double v : coarse_mesh) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("vns: coarse mesh must be positive");
    }
  }
  if (rho < 0.0 || !std::isfinite(rho)) throw ConfigError("vns: rho must be positive");
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    throw ConfigError("vns: xi must lie in (0, 1]");
  }
  if (initial_order < 1) throw ConfigError("vns: initial order must be at least 1");
  if (order_increment < 1) throw ConfigError("vns: order increment must be at least 1");
}

Point shake(std::span<const double> x, unsigned order, std::span<const double> coarse_mesh,
            const Bounds& bounds, Rng& rng) {
  if (order < 1) throw ConfigError("shake: order must be at least 1");
  const std::size_t n = x.size();
  const long k = static_cast<long>(order);
  std::uniform_int_distribution<long> pick(-k, k);
  std::vector<long> z(n);
  for (;;) {
    long top = 0;
    for (auto& v : z) {
      v = pick(rng);
      top = std::max(top, std::labs(v));
    }
    if (top == k) break;
  }
  Point p(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = coarse_mesh[j];
    double m = static_cast<double>(z[j]);
    double v = x[j] + m * step;
    if (v > bounds.upper[j]) {
      m = std::floor((bounds.upper[j] - x[j]) / step);
      v = x[j] + m * step;
      while (v > bounds.upper[j]) v = x[j] + (--m) * step;
    } else if (v < bounds.lower[j]) {
      m = std::ceil((bounds.lower[j] - x[j]) / step);
      v = x[j] + m * step;
      while (v < bounds.lower[j]) v = x[j] + (++m) * step;
    }
    p[j] = v;
  }
  return p;
}

Incumbent descent(Evaluator& evaluator, const Incumbent& start, std::span<const double> center,
                  const MeshState& state, double rho, std::size_t known, VnsBudget& budget) {
  const std::size_t n = start.point.size();
  const auto& records = evaluator.trace().records;
  auto near_known = [&](const Point& y) {
    for (std::size_t i = 0; i < known && i < records.size(); ++i) {
      if (linf_distance(records[i].point, y) <= rho) return true;
    }
    return false;
  };

  double m = 1.0;
  Incumbent cur = start;
  for (;;) {
    bool moved = false;
    for (std::size_t j = 0; j < n && !moved; ++j) {
      for (double sign : {1.0, -1.0}) {
        Point raw = cur.point;
        raw[j] += sign * m * state.mesh[j];
        Point y = snap_to_mesh(raw, center, state, evaluator.bounds());
        if (y == cur.point) continue;
        if (near_known(y)) return cur;
        const bool fresh = !evaluator.is_cached(y);
        if (fresh && budget.exhausted()) return cur;
        const double f = evaluator.evaluate(y, Stage::vns_search);
        if (fresh) ++budget.used;
        if (f < cur.value) {
          cur = {std::move(y), f};
          moved = true;
          break;
        }
      }
    }
    if (moved) {
      m *= 2.0;
    } else if (m <= 1.0) {
      return cur;
    } else {
      m = std::max(1.0, std::floor(m / 2.0));
    }
  }
}

bool vns_trigger(VnsState& state, const VnsConfig& cfg, std::size_t max_evals,
                 bool last_iteration_failed) {
  if (!last_iteration_failed) {
    state.order = cfg.initial_order;
    return false;
  }
  state.order += cfg.order_increment;
  return static_cast<double>(state.evals_used) <
         cfg.budget_fraction * static_cast<double>(max_evals);
}

std::size_t vns_eval_cap(const VnsConfig& cfg, std::size_t max_evals) {
  return static_cast<std::size_t>(std::ceil(cfg.budget_fraction * static_cast<double>(max_evals)));
}

}  // namespace orthomads
