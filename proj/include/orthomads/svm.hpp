#pragma once

// RBF-kernel soft-margin SVM: SMO dual solver, one-vs-one ensembles and the
// weighted hinge-loss objective used for (C, gamma) tuning.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orthomads/dataset.hpp"
#include "orthomads/evaluator.hpp"

namespace orthomads {

/// exp(-gamma * ||h - h'||^2).
double rbf(std::span<const double> h, std::span<const double> h2, double gamma);

struct SmoOptions {
  double tol = 1e-3;
  std::size_t max_iterations = 0;  // 0 means max(10000, 10 * d * d)
  std::size_t cache_megabytes = 128;
};

struct SvmModel {
  std::size_t cols = 0;
  std::vector<double> support;  // support vectors, row-major
  std::vector<double> coef;     // alpha_i * y_i per support vector
  double intercept = 0.0;       // b
  double gamma = 1.0;
  double C = 1.0;

  // Solver diagnostics over the full training set.
  std::vector<double> alphas;
  double dual_objective = 0.0;  // sum(alpha) - alpha^T Q alpha / 2
  std::size_t iterations = 0;
  bool stalled = false;

  std::size_t support_count() const { return coef.size(); }
};

/// Trains a binary machine. `y` holds +1 / -1.
SvmModel smo_train(const double* x, std::size_t rows, std::size_t cols, std::span<const int> y,
                   double C, double gamma, const SmoOptions& options = {});

/// sum_i alpha_i y_i k(h_i, h) + b.
double score(const SvmModel& model, std::span<const double> h);

/// Weighted mean of max(0, 1 - m_i).
double hinge_loss(std::span<const double> margins, std::span<const double> weights);

struct OvoMachine {
  int class_a = 0;  // y = +1
  int class_b = 0;  // y = -1
  SvmModel model;
};

struct OvoEnsemble {
  std::size_t num_classes = 0;
  std::vector<OvoMachine> machines;  // ordered by (class_a, class_b), a < b
};

OvoEnsemble train_ovo(const Dataset& train, double C, double gamma, const SmoOptions& options = {},
                      unsigned threads = 1);

/// Vote over pairwise machines. A score >= 0 votes for class_a. Ties go to
/// the larger sum of |score| over the machines each tied class won, then to
/// the smaller class id.
int ovo_vote(std::size_t num_classes, std::span<const std::pair<int, int>> pairs,
             std::span<const double> scores);

int predict_multiclass(const OvoEnsemble& ensemble, std::span<const double> h);

double accuracy(const OvoEnsemble& ensemble, const Dataset& data);

/// Sum over machines of the weighted hinge on the instances of the two
/// classes, divided by the total weight of those instances.
double ovo_hinge_loss(const OvoEnsemble& ensemble, const Dataset& validation);

enum class Protocol { holdout, stratified_cv };

struct ObjectiveSpec {
  Protocol protocol = Protocol::stratified_cv;
  Dataset train;
  std::optional<Dataset> validation;  // required for holdout
  std::size_t folds = 3;
  std::uint64_t fold_seed = 0;
  bool scale = false;
  SmoOptions smo;
  unsigned threads = 1;
};

/// Loss of (C, gamma) under the configured protocol. Folds are fixed at
/// construction; folds whose training part misses a class are skipped.
class SvmObjective {
 public:
  explicit SvmObjective(ObjectiveSpec spec);

  double operator()(std::span<const double> hyper) const;
  std::size_t usable_folds() const { return splits_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  struct Split {
    Dataset train;
    Dataset validation;
  };
  ObjectiveSpec spec_;
  std::vector<Split> splits_;
  std::vector<std::string> warnings_;
};

Objective make_svm_objective(ObjectiveSpec spec);

/// Trains on the full training set (scaled like the objective) and reports
/// accuracy on `test`.
double test_accuracy(const ObjectiveSpec& spec, const Dataset& test, double C, double gamma);

}  // namespace orthomads
