#include "orthomads/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <list>
#include <thread>

#include "orthomads/simd/kernels.hpp"

namespace orthomads {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Rows of Q_ij = y_i y_j k(x_i, x_j), computed on demand, least recently
// used rows evicted.
class QRowCache {
 public:
  QRowCache(const double* x, std::size_t rows, std::size_t cols, std::span<const int> y,
            double gamma, std::size_t megabytes)
      : x_(x), rows_(rows), cols_(cols), y_(y), gamma_(gamma), kernels_(simd::active_kernels()),
        slots_(rows, lru_.end()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, rows * sizeof(double));
    capacity_ = std::max<std::size_t>(2, megabytes * 1024 * 1024 / row_bytes);
  }

  const double* row(std::size_t i) {
    if (slots_[i] != lru_.end()) {
      lru_.splice(lru_.begin(), lru_, slots_[i]);
      return lru_.front().second.data();
    }
    std::vector<double> data;
    if (lru_.size() >= capacity_) {
      auto& victim = lru_.back();
      slots_[victim.first] = lru_.end();
      data = std::move(victim.second);
      lru_.pop_back();
    }
    data.resize(rows_);
    kernels_.squared_distance_rows(x_, rows_, cols_, x_ + i * cols_, data.data());
    const double yi = y_[i];
    for (std::size_t t = 0; t < rows_; ++t) data[t] = yi * y_[t] * std::exp(-gamma_ * data[t]);
    lru_.emplace_front(i, std::move(data));
    slots_[i] = lru_.begin();
    return lru_.front().second.data();
  }

 private:
  using Entry = std::pair<std::size_t, std::vector<double>>;
  const double* x_;
  std::size_t rows_, cols_;
  std::span<const int> y_;
  double gamma_;
  const simd::KernelTable& kernels_;
  std::list<Entry> lru_;
  std::vector<std::list<Entry>::iterator> slots_;
  std::size_t capacity_ = 0;
};

}  // namespace

double rbf(std::span<const double> h, std::span<const double> h2, double gamma) {
  const double d2 = simd::active_kernels().squared_distance(h.data(), h2.data(), h.size());
  return std::exp(-gamma * d2);
}

SvmModel smo_train(const double* x, std::size_t rows, std::size_t cols, std::span<const int> y,
                   double C, double gamma, const SmoOptions& options) {
  if (!(C > 0.0) || !(gamma > 0.0)) throw ConfigError("smo_train: C and gamma must be positive");
  if (y.size() != rows) throw ConfigError("smo_train: label count mismatch");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw ConfigError("smo_train: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw ConfigError("smo_train: both classes must be present");

  const auto& kernels = simd::active_kernels();
  const std::size_t d = rows;
  const std::size_t max_iter =
      options.max_iterations > 0 ? options.max_iterations : std::max<std::size_t>(10000, 10 * d * d);
  QRowCache cache(x, rows, cols, y, gamma, options.cache_megabytes);

  std::vector<double> alpha(d, 0.0);
  std::vector<double> grad(d, -1.0);  // Q alpha - e
  std::vector<double> qd(d, 1.0);     // k(x, x) = 1 for the RBF kernel
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  SvmModel model;
  model.cols = cols;
  model.gamma = gamma;
  model.C = C;

  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) {
      model.stalled = true;
      break;
    }
    // Maximal violating i, then j by the second-order gain.
    double gmax = -kInf;
    std::size_t i = d;
    for (std::size_t t = 0; t < d; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else {
        if (!lower(t) && grad[t] >= gmax) { gmax = grad[t]; i = t; }
      }
    }
    if (i == d) break;
    const double* qi = cache.row(i);
    double gmax2 = -kInf;
    double best_gain = kInf;
    std::size_t j = d;
    for (std::size_t t = 0; t < d; ++t) {
      if (y[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0.0) {
          double quad = qd[i] + qd[t] - 2.0 * y[i] * qi[t];
          if (quad <= 0.0) quad = kTau;
          const double gain = -(diff * diff) / quad;
          if (gain <= best_gain) { best_gain = gain; j = t; }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0.0) {
          double quad = qd[i] + qd[t] + 2.0 * y[i] * qi[t];
          if (quad <= 0.0) quad = kTau;
          const double gain = -(diff * diff) / quad;
          if (gain <= best_gain) { best_gain = gain; j = t; }
        }
      }
    }
    if (gmax + gmax2 < options.tol || j == d) break;

    // Capacity is at least two rows, so qi stays resident while qj loads.
    const double* qj = cache.row(j);
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = qd[i] + qd[j] + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = qd[i] + qd[j] - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    kernels.axpy2(di, qi, dj, qj, grad.data(), d);
  }
  model.iterations = iter;

  // Intercept: average of y * grad over free vectors, else the midpoint of
  // the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < d; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      sum_free += yg;
    }
  }
  const double rho = free_count > 0 ? sum_free / static_cast<double>(free_count) : 0.5 * (ub + lb);
  model.intercept = -rho;

  double obj = 0.0;
  for (std::size_t t = 0; t < d; ++t) obj += alpha[t] * (grad[t] - 1.0);
  model.dual_objective = -0.5 * obj;

  for (std::size_t t = 0; t < d; ++t) {
    if (alpha[t] > 0.0) {
      model.support.insert(model.support.end(), x + t * cols, x + (t + 1) * cols);
      model.coef.push_back(alpha[t] * y[t]);
    }
  }
  model.alphas = std::move(alpha);
  return model;
}

double score(const SvmModel& model, std::span<const double> h) {
  const auto& kernels = simd::active_kernels();
  const std::size_t m = model.coef.size();
  std::vector<double> dist(m);
  if (m > 0) kernels.squared_distance_rows(model.support.data(), m, model.cols, h.data(), dist.data());
  for (double& v : dist) v = std::exp(-model.gamma * v);
  return (m > 0 ? kernels.dot(model.coef.data(), dist.data(), m) : 0.0) + model.intercept;
}

double hinge_loss(std::span<const double> margins, std::span<const double> weights) {
  if (margins.size() != weights.size()) throw ConfigError("hinge_loss: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) s += weights[i] * std::max(0.0, 1.0 - margins[i]);
  return s;
}

OvoEnsemble train_ovo(const Dataset& train, double C, double gamma, const SmoOptions& options,
                      unsigned threads) {
  const std::size_t k = train.num_classes();
  OvoEnsemble ens;
  ens.num_classes = k;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      ens.machines.push_back({static_cast<int>(a), static_cast<int>(b), {}});
    }
  }
  auto fit = [&](OvoMachine& m) {
    std::vector<double> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < train.rows; ++i) {
      const int c = train.labels[i];
      if (c != m.class_a && c != m.class_b) continue;
      x.insert(x.end(), train.row(i), train.row(i) + train.cols);
      y.push_back(c == m.class_a ? 1 : -1);
    }
    m.model = smo_train(x.data(), y.size(), train.cols, y, C, gamma, options);
  };

  const std::size_t count = ens.machines.size();
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (auto& m : ens.machines) fit(m);
    return ens;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fit(ens.machines[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ens;
}

int ovo_vote(std::size_t num_classes, std::span<const std::pair<int, int>> pairs,
             std::span<const double> scores) {
  std::vector<int> votes(num_classes, 0);
  std::vector<double> margin(num_classes, 0.0);
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    const int winner = scores[m] >= 0.0 ? pairs[m].first : pairs[m].second;
    ++votes[static_cast<std::size_t>(winner)];
    margin[static_cast<std::size_t>(winner)] += std::abs(scores[m]);
  }
  int best = 0;
  for (std::size_t c = 1; c < num_classes; ++c) {
    const std::size_t b = static_cast<std::size_t>(best);
    if (votes[c] > votes[b] || (votes[c] == votes[b] && margin[c] > margin[b])) best = static_cast<int>(c);
  }
  return best;
}

int predict_multiclass(const OvoEnsemble& ensemble, std::span<const double> h) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> scores;
  for (const auto& m : ensemble.machines) {
    pairs.emplace_back(m.class_a, m.class_b);
    scores.push_back(score(m.model, h));
  }
  return ovo_vote(ensemble.num_classes, pairs, scores);
}

double accuracy(const OvoEnsemble& ensemble, const Dataset& data) {
  if (data.rows == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    if (predict_multiclass(ensemble, data.row_span(i)) == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.rows);
}

double ovo_hinge_loss(const OvoEnsemble& ensemble, const Dataset& validation) {
  double loss = 0.0, weight = 0.0;
  for (const auto& m : ensemble.machines) {
    std::vector<double> margins, weights;
    for (std::size_t i = 0; i < validation.rows; ++i) {
      const int c = validation.labels[i];
      if (c != m.class_a && c != m.class_b) continue;
      const double y = c == m.class_a ? 1.0 : -1.0;
      margins.push_back(y * score(m.model, validation.row_span(i)));
      weights.push_back(validation.weights[i]);
    }
    loss += hinge_loss(margins, weights);
    for (double w : weights) weight += w;
  }
  return weight > 0.0 ? loss / weight : 0.0;
}

SvmObjective::SvmObjective(ObjectiveSpec spec) : spec_(std::move(spec)) {
  spec_.train.validate();
  auto prepare = [&](Dataset train, Dataset validation) {
    if (spec_.scale) {
      const MinMaxScaler scaler = MinMaxScaler::fit(train);
      scaler.apply(train);
      scaler.apply(validation);
    }
    splits_.push_back({std::move(train), std::move(validation)});
  };

  if (spec_.protocol == Protocol::holdout) {
    if (!spec_.validation) throw ConfigError("objective: holdout needs a validation set");
    Dataset val = *spec_.validation;
    harmonize(spec_.train, val);
    prepare(spec_.train, std::move(val));
    return;
  }

  const std::vector<int> fold = stratified_kfold(spec_.train.labels, spec_.folds, spec_.fold_seed);
  for (std::size_t f = 0; f < spec_.folds; ++f) {
    std::vector<std::size_t> tr, va;
    for (std::size_t i = 0; i < fold.size(); ++i) {
      (fold[i] == static_cast<int>(f) ? va : tr).push_back(i);
    }
    Dataset train = subset(spec_.train, tr);
    const auto counts = train.class_counts();
    if (std::count(counts.begin(), counts.end(), 0u) > 0) {
      warnings_.push_back("fold " + std::to_string(f) + " skipped: a class is missing from its training part");
      std::cerr << "warning: " << warnings_.back() << '\n';
      continue;
    }
    prepare(std::move(train), subset(spec_.train, va));
  }
  if (splits_.empty()) throw ConfigError("objective: every cross-validation fold is degenerate");
}

double SvmObjective::operator()(std::span<const double> hyper) const {
  if (hyper.size() != 2) throw ConfigError("objective: expected (C, gamma)");
  double total = 0.0;
  for (const auto& s : splits_) {
    const OvoEnsemble ens = train_ovo(s.train, hyper[0], hyper[1], spec_.smo, spec_.threads);
    total += ovo_hinge_loss(ens, s.validation);
  }
  return total / static_cast<double>(splits_.size());
}

Objective make_svm_objective(ObjectiveSpec spec) {
  auto obj = std::make_shared<SvmObjective>(std::move(spec));
  return [obj](std::span<const double> x) { return (*obj)(x); };
}

double test_accuracy(const ObjectiveSpec& spec, const Dataset& test, double C, double gamma) {
  Dataset train = spec.train;
  Dataset t = test;
  harmonize(train, t);
  if (spec.scale) {
    const MinMaxScaler scaler = MinMaxScaler::fit(train);
    scaler.apply(train);
    scaler.apply(t);
  }
  return accuracy(train_ovo(train, C, gamma, spec.smo, spec.threads), t);
}

}  // namespace orthomads
