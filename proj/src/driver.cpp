#include "orthomads/driver.hpp"

#include <algorithm>
#include <cmath>

namespace orthomads {
namespace {

bool mesh_converged(const MeshState& state, const Point& min_mesh) {
  for (std::size_t j = 0; j < state.mesh.size(); ++j) {
    if (state.mesh[j] <= min_mesh[j]) return true;
  }
  return false;
}

std::uint64_t vns_stream_seed(std::uint64_t seed) { return seed ^ 0x6a09e667f3bcc909ULL; }

}  // namespace

std::size_t TunerConfig::effective_max_evals() const {
  return max_evals > 0 ? max_evals : 100 * bounds.dimension();
}

void TunerConfig::validate() const {
  bounds.validate();
  const std::size_t n = bounds.dimension();
  if (x0.size() != n) throw ConfigError("config: x0 has the wrong dimension");
  if (!bounds.contains(x0)) throw ConfigError("config: x0 lies outside the bounds");
  const Point mm = broadcast(min_mesh, n, "min_mesh");
  for (double v : mm) {
    if (!(v > 0.0)) throw ConfigError("config: min_mesh must be positive");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("config: tau must lie in (0, 1)");
  if (!initial_frame.empty()) {
    const Point f = broadcast(initial_frame, n, "initial_frame");
    for (double v : f) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("config: initial frame must be positive");
    }
  }
  if (nm_enabled) nm.validate();
  if (vns) vns->validate(n);
  if (threads < 1) throw ConfigError("config: threads must be at least 1");
}

PollOutcome poll_step(Evaluator& evaluator, const Incumbent& incumbent, const MeshState& state,
                      std::uint64_t iteration, std::uint64_t seed, bool opportunistic) {
  const DirectionSet dirs = poll_directions(iteration, seed, state);
  const std::size_t n = incumbent.point.size();
  std::vector<Point> trials;
  trials.reserve(dirs.size());
  for (const Point& d : dirs.directions) {
    Point raw(n);
    for (std::size_t j = 0; j < n; ++j) raw[j] = incumbent.point[j] + state.mesh[j] * d[j];
    trials.push_back(snap_to_mesh(raw, incumbent.point, state, evaluator.bounds()));
  }

  PollOutcome out;
  out.point = incumbent;
  if (opportunistic) {
    for (const Point& t : trials) {
      const double f = evaluator.evaluate(t, Stage::poll);
      if (f < incumbent.value) {
        out.improved = true;
        out.point = {t, f};
        break;
      }
    }
    return out;
  }
  const std::vector<double> values = evaluator.evaluate_batch(trials, Stage::poll);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (values[i] < out.point.value) out.point = {trials[i], values[i]};
  }
  out.improved = out.point.value < incumbent.value;
  return out;
}

RunResult optimize(const TunerConfig& config, const Objective& objective) {
  config.validate();
  const std::size_t n = config.bounds.dimension();
  const std::size_t max_evals = config.effective_max_evals();
  const Point min_mesh = broadcast(config.min_mesh, n, "min_mesh");

  Evaluator evaluator(objective, config.bounds, max_evals, config.threads);
  MeshState state = config.initial_frame.empty()
                        ? initial_sizes(config.bounds, config.tau)
                        : initial_sizes(broadcast(config.initial_frame, n, "initial_frame"), config.tau);

  VnsConfig vns_cfg;
  VnsState vns_state;
  Rng rng(vns_stream_seed(config.seed));
  std::size_t vns_cap = 0;
  if (config.vns) {
    vns_cfg = *config.vns;
    if (vns_cfg.coarse_mesh.empty()) {
      vns_cfg.coarse_mesh = config.bounds.width();
      for (double& v : vns_cfg.coarse_mesh) v /= 10.0;
    }
    if (vns_cfg.rho == 0.0) vns_cfg.rho = *std::min_element(min_mesh.begin(), min_mesh.end());
    vns_state.order = vns_cfg.initial_order;
    vns_cap = vns_eval_cap(vns_cfg, max_evals);
  }

  RunResult result;
  RunTrace& trace = evaluator.trace();
  bool vns_pending = false;
  std::size_t k = 0;
  try {
    evaluator.evaluate(config.x0, Stage::initial);
    for (;; ++k) {
      if (config.target && evaluator.best().value <= *config.target) {
        trace.reason = TerminalReason::target_reached;
        break;
      }
      if (mesh_converged(state, min_mesh)) {
        trace.reason = TerminalReason::mesh_converged;
        break;
      }
      const Incumbent start = evaluator.best();
      IterationRecord it;
      it.iteration = k;
      it.center = start.point;
      it.frame = state.frame;
      it.mesh = state.mesh;
      it.first_eval = evaluator.evaluations();
      trace.iterations.push_back(it);

      if (vns_pending) {
        VnsBudget budget{0, vns_cap - std::min(vns_cap, vns_state.evals_used)};
        const std::size_t known = evaluator.evaluations();
        Point shaken = shake(start.point, vns_state.order, vns_cfg.coarse_mesh, config.bounds, rng);
        shaken = snap_to_mesh(shaken, start.point, state, config.bounds);
        const bool fresh = !evaluator.is_cached(shaken);
        if (!(fresh && budget.exhausted())) {
          const double f = evaluator.evaluate(shaken, Stage::vns_search);
          if (fresh) ++budget.used;
          try {
            descent(evaluator, {shaken, f}, start.point, state, vns_cfg.rho, known, budget);
          } catch (const BudgetExhausted&) {
            vns_state.evals_used += budget.used;
            throw;
          }
        }
        vns_state.evals_used += budget.used;
      }

      if (config.nm_enabled) {
        nm_search_stage(evaluator, evaluator.best(), state, config.nm);
      }

      bool success = evaluator.best().value < start.value;
      if (!success) {
        trace.iterations.back().poll_ran = true;
        success = poll_step(evaluator, start, state, k, config.seed, config.opportunistic).improved;
      }

      const MeshState next = update_after_iteration(state, success);
      IterationRecord& rec = trace.iterations.back();
      rec.success = success;
      rec.end_eval = evaluator.evaluations();
      rec.frame_after = next.frame;
      rec.mesh_after = next.mesh;
      state = next;
      if (config.vns) vns_pending = vns_trigger(vns_state, vns_cfg, max_evals, !success);
    }
  } catch (const BudgetExhausted&) {
    trace.reason = TerminalReason::budget_exhausted;
    if (!trace.iterations.empty() && trace.iterations.back().frame_after.empty()) {
      IterationRecord& rec = trace.iterations.back();
      rec.end_eval = evaluator.evaluations();
      rec.frame_after = rec.frame;
      rec.mesh_after = rec.mesh;
    }
  }

  result.iterations = trace.iterations.size();
  result.best = evaluator.best();
  result.trace = std::move(trace);
  return result;
}

}  // namespace orthomads
