#pragma once

// Experiment harness behind the command-line tool: objective sources, seeded
// repeats, trace and summary files, parameter sweeps and average rankings.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orthomads/dataset.hpp"
#include "orthomads/driver.hpp"
#include "orthomads/svm.hpp"

namespace orthomads {

/// 2-D analytic test functions over the default (C, gamma) box: sphere,
/// rosenbrock, double_well, rastrigin.
Objective analytic_function(std::string_view name);
Point analytic_minimizer(std::string_view name);

enum class Method { mads, mads_nm, mads_nm_vns, grid, random, sa };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);
bool is_mads(Method method);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::two_moons;
  std::size_t per_class = 50;
  double noise = 0.3;
  std::uint64_t data_seed = 7;  // test split uses data_seed + 1
};

/// "kind,n,noise", n instances per class.
SyntheticSpec parse_synthetic_spec(std::string_view text);

/// Comma-separated reals.
Point parse_point(std::string_view text);

struct ExperimentSpec {
  std::string dataset_path;
  std::string validation_path;  // switches the protocol to holdout
  std::string test_path;
  std::optional<SyntheticSpec> synthetic;
  std::string function;
  std::size_t folds = 3;
  std::uint64_t fold_seed = 0;
  bool scale = false;

  Method method = Method::mads_nm_vns;
  Bounds bounds{{0.01, 0.01}, {100.01, 100.01}};
  Point x0{50.0, 50.0};
  Point min_mesh{0.009};
  double xi = 0.25;
  double tau = 0.5;
  std::size_t max_evals = 0;  // 0: 100 * n for MADS, 100 for baselines
  std::size_t grid_points = 0;  // 0: the {1, 10, ..., 90} axes
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string out_dir;
  bool timing = true;
  unsigned threads = 1;

  void validate() const;
  std::string source_name() const;
};

struct Stats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one value
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

Stats describe(std::span<const double> values);

struct RepeatResult {
  std::uint64_t seed = 0;
  Incumbent best;
  std::size_t evaluations = 0;
  TerminalReason reason = TerminalReason::budget_exhausted;
  std::optional<double> test_accuracy;
  double wall_seconds = 0.0;
  RunTrace trace;
};

struct SummaryRow {
  std::string method;
  std::string dataset;
  std::optional<Stats> accuracy;
  Stats evaluations;
  Stats loss;
  std::vector<TerminalReason> reasons;
  double wall_seconds = 0.0;
};

struct RunReport {
  SummaryRow summary;
  std::vector<RepeatResult> repeats;
};

/// Runs spec.repeats seeded repeats (seed + r). When out_dir is set, writes
/// trace_<r>.csv and summary.json; on failure, files written so far are
/// removed.
RunReport run(const ExperimentSpec& spec);

void write_trace_csv(const RunTrace& trace, std::ostream& out);
nlohmann::ordered_json summary_json(const RunReport& report, bool timing);

enum class SweepAxis { xi, min_mesh, x0 };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// Published sweep grids: xi {0.25, 0.5, 0.75, 0.9}, min_mesh {9e-1, 9e-3,
/// 9e-7} and ten starting points written "C:gamma".
std::vector<std::string> preset_sweep_values(SweepAxis axis);

struct SweepEntry {
  std::string value;
  std::optional<SummaryRow> row;
  std::string error;
};

/// One run per value, each in out_dir/<axis>_<index>; sweep.json combines
/// them. A failing value is recorded and the sweep moves on.
std::vector<SweepEntry> sweep(const ExperimentSpec& spec, SweepAxis axis,
                              const std::vector<std::string>& values);

enum class TieRule { average, competition, dense };

TieRule parse_tie_rule(std::string_view name);

/// Rank of each value (1 = best). Ties share the mean of their ranks
/// (average), the lowest rank (competition) or consecutive ranks (dense).
std::vector<double> rank_values(std::span<const double> values, bool higher_is_better, TieRule rule);

struct ScoreRow {
  std::string dataset;
  std::string method;
  double mean = 0.0;
  double max = 0.0;
};

struct RankColumn {
  std::vector<double> average_rank;
  std::vector<std::size_t> position;  // 1 = smallest average rank
};

struct Ranking {
  std::vector<std::string> methods;  // first-appearance order
  RankColumn best_mean;   // mean accuracy, higher is better
  RankColumn worst_mean;  // mean accuracy, lower ranks first
  RankColumn best_max;    // maximum accuracy, higher is better
};

/// Average rank over datasets per criterion. Throws ConfigError naming the
/// first missing (method, dataset) cell.
Ranking rank(std::span<const ScoreRow> rows, TieRule rule = TieRule::average);

/// CSV with a header containing dataset, method, mean and max columns.
std::vector<ScoreRow> read_score_csv(std::istream& in);
/// Score rows from summary.json files.
ScoreRow score_from_summary(const nlohmann::json& summary);
void write_ranking_csv(const Ranking& ranking, std::ostream& out);

}  // namespace orthomads
