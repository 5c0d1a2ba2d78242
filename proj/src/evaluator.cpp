#include "orthomads/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace orthomads {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Key resolution as a fraction of the box width; far below any usable mesh.
constexpr double kQuantumFraction = 0x1p-45;

}  // namespace

EvalCache::EvalCache(const Bounds& bounds) : origin_(bounds.lower), quantum_(bounds.width()) {
  for (double& q : quantum_) q *= kQuantumFraction;
}

EvalCache::Key EvalCache::key_of(std::span<const double> x) const {
  Key key(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    key[j] = std::llround((x[j] - origin_[j]) / quantum_[j]);
  }
  return key;
}

std::optional<double> EvalCache::lookup(std::span<const double> x) const {
  const Key key = key_of(x);
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.first;
}

bool EvalCache::insert(std::span<const double> x, double value) {
  Key key = key_of(x);
  std::unique_lock lock(mutex_);
  const std::size_t order = entries_.size();
  return entries_.try_emplace(std::move(key), value, order).second;
}

std::size_t EvalCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

Evaluator::Evaluator(Objective objective, Bounds bounds, std::size_t max_evals, unsigned threads)
    : objective_(std::move(objective)),
      bounds_(std::move(bounds)),
      max_evals_(max_evals),
      threads_(std::max(1u, threads)),
      cache_((bounds_.validate(), bounds_)) {
  if (!objective_) throw ConfigError("evaluator: objective is empty");
  if (max_evals_ < 1) throw ConfigError("evaluator: max_evals must be at least 1");
}

void Evaluator::commit(std::span<const double> x, double value, Stage stage) {
  cache_.insert(x, value);
  TraceRecord rec;
  rec.eval_index = trace_.records.size() + 1;
  rec.point.assign(x.begin(), x.end());
  rec.value = value;
  rec.stage = stage;
  if (!best_index_ || value < trace_.records[*best_index_].value) {
    best_index_ = trace_.records.size();
  }
  rec.best_so_far = best_index_ == trace_.records.size() ? value : trace_.records[*best_index_].value;
  trace_.records.push_back(std::move(rec));
}

double Evaluator::evaluate(std::span<const double> x, Stage stage) {
  if (!bounds_.contains(x)) return kInf;
  if (auto hit = cache_.lookup(x)) return *hit;
  if (evaluations() >= max_evals_) throw BudgetExhausted();
  const double value = objective_(x);
  commit(x, value, stage);
  return value;
}

std::vector<double> Evaluator::evaluate_batch(std::span<const Point> points, Stage stage) {
  std::vector<double> out(points.size(), kInf);
  // Fresh points in input order, first occurrence only.
  std::vector<std::size_t> fresh;
  std::vector<std::size_t> source(points.size(), SIZE_MAX);
  {
    EvalCache seen(bounds_);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!bounds_.contains(points[i])) continue;
      if (auto hit = cache_.lookup(points[i])) {
        out[i] = *hit;
        continue;
      }
      if (seen.insert(points[i], static_cast<double>(fresh.size()))) {
        source[i] = fresh.size();
        fresh.push_back(i);
      } else {
        source[i] = static_cast<std::size_t>(*seen.lookup(points[i]));
      }
    }
  }

  const std::size_t allowed = std::min(fresh.size(), remaining());
  std::vector<double> values(allowed);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, allowed));
  if (workers <= 1) {
    for (std::size_t k = 0; k < allowed; ++k) values[k] = objective_(points[fresh[k]]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < allowed; k = next++) {
          try {
            values[k] = objective_(points[fresh[k]]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t k = 0; k < allowed; ++k) commit(points[fresh[k]], values[k], stage);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (source[i] != SIZE_MAX && source[i] < allowed) out[i] = values[source[i]];
  }
  if (allowed < fresh.size()) throw BudgetExhausted();
  return out;
}

bool Evaluator::is_cached(std::span<const double> x) const { return cache_.lookup(x).has_value(); }

std::optional<double> Evaluator::cached_value(std::span<const double> x) const {
  return cache_.lookup(x);
}

Incumbent Evaluator::best() const {
  if (!best_index_) throw std::logic_error("evaluator: no evaluations yet");
  const auto& rec = trace_.records[*best_index_];
  return {rec.point, rec.value};
}

unsigned threads_from_environment() {
  const char* env = std::getenv("ORTHOMADS_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) return 1;
  return static_cast<unsigned>(std::min<long>(v, 256));
}

}  // namespace orthomads
