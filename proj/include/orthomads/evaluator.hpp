#pragma once

// The single gateway to the black box: extreme barrier, evaluation cache,
// evaluation budget and the run trace.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "orthomads/types.hpp"

namespace orthomads {

/// Black-box objective. May return +infinity. Must be safe to call
/// concurrently when the evaluator runs with more than one thread.
using Objective = std::function<double(std::span<const double>)>;

/// Thrown when a fresh evaluation would exceed the evaluation budget.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

struct Incumbent {
  Point point;
  double value = 0.0;
};

struct TraceRecord {
  std::size_t eval_index = 0;  // 1-based
  Point point;
  double value = 0.0;
  Stage stage = Stage::initial;
  double best_so_far = 0.0;
};

/// Mesh state seen by one driver iteration, for post-hoc checks.
struct IterationRecord {
  std::size_t iteration = 0;
  Point center;
  Point frame;
  Point mesh;
  Point frame_after;
  Point mesh_after;
  bool success = false;
  bool poll_ran = false;
  std::size_t first_eval = 0;  // trace indices [first_eval, end_eval)
  std::size_t end_eval = 0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<IterationRecord> iterations;
  TerminalReason reason = TerminalReason::budget_exhausted;
};

/// Map from canonical mesh coordinates to objective values.
///
/// Keys quantize each coordinate to a fixed fraction of the box width, so the
/// same mesh point reached from different centers maps to one entry. Lookups
/// and inserts are safe to run concurrently.
class EvalCache {
 public:
  explicit EvalCache(const Bounds& bounds);

  std::optional<double> lookup(std::span<const double> x) const;
  /// Returns false (and keeps the stored value) when the key already exists.
  bool insert(std::span<const double> x, double value);
  std::size_t size() const;

 private:
  using Key = std::vector<std::int64_t>;
  Key key_of(std::span<const double> x) const;

  Point origin_;
  Point quantum_;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::pair<double, std::size_t>> entries_;
};

class Evaluator {
 public:
  Evaluator(Objective objective, Bounds bounds, std::size_t max_evals, unsigned threads = 1);

  /// Barrier, cache, budget, trace. Infeasible points return +inf without
  /// touching the objective or the counter.
  double evaluate(std::span<const double> x, Stage stage);

  /// Evaluates fresh points concurrently and commits them in input order.
  /// When the budget runs out part-way the committed prefix is kept and
  /// BudgetExhausted is thrown.
  std::vector<double> evaluate_batch(std::span<const Point> points, Stage stage);

  bool is_cached(std::span<const double> x) const;
  std::optional<double> cached_value(std::span<const double> x) const;

  std::size_t evaluations() const { return trace_.records.size(); }
  std::size_t max_evals() const { return max_evals_; }
  std::size_t remaining() const { return max_evals_ - evaluations(); }
  const Bounds& bounds() const { return bounds_; }

  bool has_best() const { return best_index_.has_value(); }
  Incumbent best() const;

  RunTrace& trace() { return trace_; }
  const RunTrace& trace() const { return trace_; }

 private:
  void commit(std::span<const double> x, double value, Stage stage);

  Objective objective_;
  Bounds bounds_;
  std::size_t max_evals_;
  unsigned threads_;
  EvalCache cache_;
  RunTrace trace_;
  std::optional<std::size_t> best_index_;
};

/// Worker count from ORTHOMADS_THREADS; 1 when unset or invalid.
unsigned threads_from_environment();

}  // namespace orthomads
