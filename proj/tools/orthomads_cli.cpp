// Command-line front end: run, sweep and rank.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "orthomads/bench.hpp"

namespace om = orthomads;

namespace {

struct Args {
  std::string dataset, validation, test, synthetic, function;
  std::size_t folds = 3;
  bool scale = false;
  std::string method = "mads-nm-vns";
  std::string lower = "0.01,0.01", upper = "100.01,100.01", x0 = "50,50", min_mesh = "0.009";
  double xi = 0.25, tau = 0.5;
  std::size_t max_evals = 0, grid_points = 0, repeats = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  bool no_timing = false;
};

void add_experiment_options(CLI::App* app, Args& a) {
  app->add_option("--dataset", a.dataset, "LIBSVM training file");
  app->add_option("--validation", a.validation, "LIBSVM validation file (holdout protocol)");
  app->add_option("--test", a.test, "LIBSVM test file for reported accuracy");
  app->add_option("--synthetic", a.synthetic, "kind,n,noise with kind in blobs|two_moons|double_ring");
  app->add_option("--function", a.function, "sphere|rosenbrock|double_well|rastrigin");
  app->add_option("--folds", a.folds, "cross-validation folds")->capture_default_str();
  app->add_flag("--scale", a.scale, "min-max scale features on the training split");
  app->add_option("--method", a.method, "mads|mads-nm|mads-nm-vns|grid|random|sa")->capture_default_str();
  app->add_option("--lower", a.lower, "lower bounds C,gamma")->capture_default_str();
  app->add_option("--upper", a.upper, "upper bounds C,gamma")->capture_default_str();
  app->add_option("--x0", a.x0, "starting point C,gamma")->capture_default_str();
  app->add_option("--min-mesh", a.min_mesh, "minimum mesh size, scalar or per dimension")->capture_default_str();
  app->add_option("--xi", a.xi, "VNS budget fraction")->capture_default_str();
  app->add_option("--tau", a.tau, "mesh contraction factor")->capture_default_str();
  app->add_option("--max-evals", a.max_evals, "evaluation budget (0: default)");
  app->add_option("--grid-points", a.grid_points, "points per axis for grid search (0: preset axes)");
  app->add_option("--seed", a.seed, "base seed; repeat r uses seed + r")->capture_default_str();
  app->add_option("--repeats", a.repeats, "number of seeded repeats")->capture_default_str();
  app->add_option("--threads", a.threads, "repeats run in parallel")->capture_default_str();
  app->add_option("--out", a.out, "output directory");
  app->add_flag("--no-timing", a.no_timing, "omit wall-clock fields so outputs are byte-stable");
}

om::ExperimentSpec to_spec(const Args& a) {
  om::ExperimentSpec s;
  s.dataset_path = a.dataset;
  s.validation_path = a.validation;
  s.test_path = a.test;
  if (!a.synthetic.empty()) s.synthetic = om::parse_synthetic_spec(a.synthetic);
  s.function = a.function;
  s.folds = a.folds;
  s.scale = a.scale;
  s.method = om::parse_method(a.method);
  s.bounds = om::Bounds{om::parse_point(a.lower), om::parse_point(a.upper)};
  s.x0 = om::parse_point(a.x0);
  s.min_mesh = om::parse_point(a.min_mesh);
  s.xi = a.xi;
  s.tau = a.tau;
  s.max_evals = a.max_evals;
  s.grid_points = a.grid_points;
  s.seed = a.seed;
  s.repeats = a.repeats;
  s.threads = a.threads;
  s.out_dir = a.out;
  s.timing = !a.no_timing;
  return s;
}

void print_row(const om::SummaryRow& row) {
  std::cout << row.method << " on " << row.dataset << ": loss mean " << om::format_real(row.loss.mean)
            << ", evaluations mean " << row.evaluations.mean;
  if (row.accuracy) std::cout << ", test accuracy mean " << row.accuracy->mean << " max " << row.accuracy->max;
  std::cout << '\n';
}

int fail(std::string_view kind, const std::string& message, int code) {
  nlohmann::ordered_json j{{"error", std::string(kind)}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

std::vector<om::ScoreRow> load_scores(const std::vector<std::string>& inputs) {
  std::vector<om::ScoreRow> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw om::ConfigError("cannot open " + path);
    if (std::filesystem::path(path).extension() == ".json") {
      rows.push_back(om::score_from_summary(nlohmann::json::parse(in)));
    } else {
      auto more = om::read_score_csv(in);
      rows.insert(rows.end(), more.begin(), more.end());
    }
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperparameter tuning of RBF-kernel SVMs by mesh-adaptive direct search"};
  app.require_subcommand(1);

  Args run_args;
  auto* run_cmd = app.add_subcommand("run", "tune one configuration over seeded repeats");
  add_experiment_options(run_cmd, run_args);

  Args sweep_args;
  std::string axis;
  std::vector<std::string> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "repeat a run over values of one parameter");
  add_experiment_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--axis", axis, "xi|min_mesh|x0")->required();
  sweep_cmd->add_option("--values", values, "values to try (x0 and multi-dimensional min_mesh as a:b); default: preset grid");

  std::vector<std::string> inputs;
  std::string ties = "average";
  std::string rank_out;
  auto* rank_cmd = app.add_subcommand("rank", "average ranks of methods across datasets");
  rank_cmd->add_option("--input", inputs, "score CSV (dataset,method,mean,max) or summary.json files")->required();
  rank_cmd->add_option("--ties", ties, "average|competition|dense")->capture_default_str();
  rank_cmd->add_option("--out", rank_out, "write the ranking CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) {
      const auto report = om::run(to_spec(run_args));
      print_row(report.summary);
    } else if (*sweep_cmd) {
      const auto a = om::parse_sweep_axis(axis);
      if (values.empty()) values = om::preset_sweep_values(a);
      int failures = 0;
      for (const auto& e : om::sweep(to_spec(sweep_args), a, values)) {
        std::cout << om::to_string(a) << '=' << e.value << ": ";
        if (e.row) {
          print_row(*e.row);
        } else {
          std::cout << "error: " << e.error << '\n';
          ++failures;
        }
      }
      if (failures == static_cast<int>(values.size())) return fail("sweep", "every value failed", 1);
    } else if (*rank_cmd) {
      const auto rows = load_scores(inputs);
      const auto ranking = om::rank(rows, om::parse_tie_rule(ties));
      if (rank_out.empty()) {
        om::write_ranking_csv(ranking, std::cout);
      } else {
        std::ofstream out(rank_out);
        if (!out) throw std::runtime_error("cannot write " + rank_out);
        om::write_ranking_csv(ranking, out);
      }
    }
  } catch (const om::ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const om::ParseError& e) {
    return fail("parse", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
