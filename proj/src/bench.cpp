#include "orthomads/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "orthomads/baselines.hpp"

namespace orthomads {
namespace fs = std::filesystem;

namespace {

double double_well_1d(double u) { return (u * u - 1.0) * (u * u - 1.0) + 0.25 * u; }

// Coordinates of the double-well and Rastrigin functions inside the box.
constexpr double kWellCenter = 50.01;
constexpr double kWellScale = 50.0 / 3.0;

double deep_well_location() {
  // Root of 4u^3 - 4u + 0.25 near u = -1.
  double u = -1.0;
  for (int i = 0; i < 50; ++i) u -= (4 * u * u * u - 4 * u + 0.25) / (12 * u * u - 4);
  return u;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": '" + s + "' is not a number");
  }
}

nlohmann::ordered_json stats_json(const Stats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"median", s.median}};
}

// Writes to a temporary name and renames, so readers never see half a file.
void write_atomically(const fs::path& path, const std::string& content,
                      std::vector<fs::path>& written) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
  written.push_back(path);
}

struct Source {
  Objective objective;
  std::optional<ObjectiveSpec> svm;
  std::optional<Dataset> test;
};

Source build_source(const ExperimentSpec& spec) {
  Source src;
  if (!spec.function.empty()) {
    src.objective = analytic_function(spec.function);
    return src;
  }
  ObjectiveSpec os;
  os.folds = spec.folds;
  os.fold_seed = spec.fold_seed;
  os.scale = spec.scale;
  if (spec.synthetic) {
    const SyntheticSpec& s = *spec.synthetic;
    const std::size_t sizes[2] = {s.per_class, s.per_class};
    os.train = make_synthetic(s.kind, sizes, s.noise, s.data_seed);
    src.test = make_synthetic(s.kind, sizes, s.noise, s.data_seed + 1);
  } else {
    os.train = load_libsvm(spec.dataset_path);
    if (!spec.test_path.empty()) {
      Dataset t = load_libsvm(spec.test_path);
      harmonize(os.train, t);
      src.test = std::move(t);
    }
  }
  if (!spec.validation_path.empty()) {
    os.protocol = Protocol::holdout;
    os.validation = load_libsvm(spec.validation_path);
  }
  src.objective = make_svm_objective(os);
  src.svm = std::move(os);
  return src;
}

RunResult run_method(const ExperimentSpec& spec, const Objective& objective, std::uint64_t seed) {
  if (is_mads(spec.method)) {
    TunerConfig cfg;
    cfg.bounds = spec.bounds;
    cfg.x0 = spec.x0;
    cfg.min_mesh = spec.min_mesh;
    cfg.max_evals = spec.max_evals;
    cfg.seed = seed;
    cfg.tau = spec.tau;
    cfg.nm_enabled = spec.method != Method::mads;
    if (spec.method == Method::mads_nm_vns) {
      VnsConfig v;
      v.budget_fraction = spec.xi;
      cfg.vns = v;
    }
    return optimize(cfg, objective);
  }
  BaselineConfig b;
  b.bounds = spec.bounds;
  b.budget = spec.max_evals > 0 ? spec.max_evals : 100;
  b.seed = seed;
  b.x0 = spec.x0;
  if (spec.method == Method::grid) {
    if (spec.grid_points > 0) {
      b.grid_points_per_axis = spec.grid_points;
    } else {
      b.grid_axes = preset_grid_axes();
    }
    b.method = BaselineMethod::grid;
  } else {
    b.method = spec.method == Method::random ? BaselineMethod::random : BaselineMethod::sa;
  }
  return run_baseline(objective, b);
}

}  // namespace

Objective analytic_function(std::string_view name) {
  if (name == "sphere") {
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += (v - 50.0) * (v - 50.0);
      return s;
    };
  }
  if (name == "rosenbrock") {
    return [](std::span<const double> x) {
      const double a = (x[0] - 50.0) / 25.0, b = (x[1] - 50.0) / 25.0;
      return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
    };
  }
  if (name == "double_well") {
    return [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += double_well_1d((v - kWellCenter) / kWellScale);
      return s;
    };
  }
  if (name == "rastrigin") {
    return [](std::span<const double> x) {
      double s = 10.0 * static_cast<double>(x.size());
      for (double v : x) {
        const double u = (v - 50.0) / 10.0;
        s += u * u - 10.0 * std::cos(2.0 * std::numbers::pi * u);
      }
      return s;
    };
  }
  throw ConfigError("unknown function '" + std::string(name) + "'");
}

Point analytic_minimizer(std::string_view name) {
  if (name == "sphere" || name == "rastrigin") return {50.0, 50.0};
  if (name == "rosenbrock") return {75.0, 75.0};
  if (name == "double_well") {
    const double x = kWellCenter + kWellScale * deep_well_location();
    return {x, x};
  }
  throw ConfigError("unknown function '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  if (name == "mads") return Method::mads;
  if (name == "mads-nm") return Method::mads_nm;
  if (name == "mads-nm-vns") return Method::mads_nm_vns;
  if (name == "grid") return Method::grid;
  if (name == "random") return Method::random;
  if (name == "sa") return Method::sa;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::mads: return "mads";
    case Method::mads_nm: return "mads-nm";
    case Method::mads_nm_vns: return "mads-nm-vns";
    case Method::grid: return "grid";
    case Method::random: return "random";
    case Method::sa: return "sa";
  }
  return "unknown";
}

bool is_mads(Method method) {
  return method == Method::mads || method == Method::mads_nm || method == Method::mads_nm_vns;
}

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("--synthetic expects kind,n,noise");
  SyntheticSpec s;
  try {
    s.kind = parse_synthetic_kind(trim(parts[0]));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double n = parse_double(trim(parts[1]), "--synthetic n");
  if (!(n >= 4) || n != std::floor(n)) throw ConfigError("--synthetic n must be an integer >= 4");
  s.per_class = static_cast<std::size_t>(n);
  s.noise = parse_double(trim(parts[2]), "--synthetic noise");
  if (!(s.noise >= 0.0)) throw ConfigError("--synthetic noise must be non-negative");
  return s;
}

Point parse_point(std::string_view text) {
  Point p;
  for (const auto& part : split(text, ',')) p.push_back(parse_double(trim(part), "point"));
  return p;
}

void ExperimentSpec::validate() const {
  const int sources = !dataset_path.empty() + synthetic.has_value() + !function.empty();
  if (sources != 1) throw ConfigError("choose exactly one of --dataset, --synthetic, --function");
  if (repeats < 1) throw ConfigError("--repeats must be at least 1");
  bounds.validate();
  if (bounds.dimension() != 2) throw ConfigError("the bench tunes two parameters (C, gamma)");
  if (!function.empty()) analytic_function(function);
  for (const auto* path : {&dataset_path, &validation_path, &test_path}) {
    if (!path->empty() && !fs::exists(*path)) throw ConfigError("file not found: " + *path);
  }
  if (!function.empty() && (!validation_path.empty() || !test_path.empty())) {
    throw ConfigError("--validation and --test need a dataset source");
  }
  if (folds < 2) throw ConfigError("--folds must be at least 2");
  if (is_mads(method)) {
    TunerConfig cfg;
    cfg.bounds = bounds;
    cfg.x0 = x0;
    cfg.min_mesh = min_mesh;
    cfg.tau = tau;
    cfg.validate();
    if (!(xi > 0.0 && xi <= 1.0)) throw ConfigError("--xi must lie in (0, 1]");
  } else if (x0.size() != 2 || !bounds.contains(x0)) {
    throw ConfigError("x0 must lie inside the bounds");
  }
}

std::string ExperimentSpec::source_name() const {
  if (!function.empty()) return function;
  if (synthetic) {
    std::string kind = synthetic->kind == SyntheticKind::blobs       ? "blobs"
                       : synthetic->kind == SyntheticKind::two_moons ? "two_moons"
                                                                     : "double_ring";
    std::ostringstream name;
    name << kind << ',' << synthetic->per_class << ',' << synthetic->noise;
    return name.str();
  }
  return fs::path(dataset_path).filename().string();
}

Stats describe(std::span<const double> values) {
  Stats s;
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  s.min = v.front();
  s.max = v.back();
  s.median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  // Keep min <= mean <= max despite rounding in the sum.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "eval_index,stage,C,gamma,loss,best_so_far\n";
  for (const auto& r : trace.records) {
    out << r.eval_index << ',' << to_string(r.stage);
    for (double v : r.point) out << ',' << format_real(v);
    out << ',' << format_real(r.value) << ',' << format_real(r.best_so_far) << '\n';
  }
}

nlohmann::ordered_json summary_json(const RunReport& report, bool timing) {
  const SummaryRow& s = report.summary;
  nlohmann::ordered_json j;
  j["method"] = s.method;
  j["dataset"] = s.dataset;
  j["repeats"] = report.repeats.size();
  j["accuracy"] = s.accuracy ? stats_json(*s.accuracy) : nlohmann::ordered_json(nullptr);
  j["evaluations"] = stats_json(s.evaluations);
  j["loss"] = stats_json(s.loss);
  auto reasons = nlohmann::ordered_json::array();
  for (auto r : s.reasons) reasons.push_back(std::string(to_string(r)));
  j["terminal_reasons"] = reasons;
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : report.repeats) {
    nlohmann::ordered_json run;
    run["seed"] = r.seed;
    run["best"] = r.best.point;
    run["loss"] = r.best.value;
    run["evaluations"] = r.evaluations;
    run["terminal_reason"] = std::string(to_string(r.reason));
    run["test_accuracy"] = r.test_accuracy ? nlohmann::ordered_json(*r.test_accuracy) : nlohmann::ordered_json(nullptr);
    if (timing) run["wall_seconds"] = r.wall_seconds;
    runs.push_back(std::move(run));
  }
  j["runs"] = runs;
  if (timing) j["wall_seconds"] = s.wall_seconds;
  return j;
}

RunReport run(const ExperimentSpec& spec) {
  spec.validate();
  const Source src = build_source(spec);

  RunReport report;
  report.repeats.resize(spec.repeats);
  auto one = [&](std::size_t r) {
    const auto t0 = std::chrono::steady_clock::now();
    RepeatResult& out = report.repeats[r];
    out.seed = spec.seed + r;
    RunResult res = run_method(spec, src.objective, out.seed);
    out.best = res.best;
    out.evaluations = res.trace.records.size();
    out.reason = res.trace.reason;
    out.trace = std::move(res.trace);
    if (src.svm && src.test) {
      out.test_accuracy = test_accuracy(*src.svm, *src.test, out.best.point[0], out.best.point[1]);
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, spec.threads), spec.repeats));
  if (workers <= 1) {
    for (std::size_t r = 0; r < spec.repeats; ++r) one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(spec.repeats);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < spec.repeats; r = next++) {
          try {
            one(r);
          } catch (...) {
            errors[r] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SummaryRow& row = report.summary;
  row.method = std::string(to_string(spec.method));
  row.dataset = spec.source_name();
  std::vector<double> acc, evals, loss;
  for (const auto& r : report.repeats) {
    if (r.test_accuracy) acc.push_back(*r.test_accuracy);
    evals.push_back(static_cast<double>(r.evaluations));
    loss.push_back(r.best.value);
    row.reasons.push_back(r.reason);
    row.wall_seconds += r.wall_seconds;
  }
  if (!acc.empty()) row.accuracy = describe(acc);
  row.evaluations = describe(evals);
  row.loss = describe(loss);

  if (!spec.out_dir.empty()) {
    std::vector<fs::path> written;
    try {
      fs::create_directories(spec.out_dir);
      for (std::size_t r = 0; r < report.repeats.size(); ++r) {
        std::ostringstream csv;
        write_trace_csv(report.repeats[r].trace, csv);
        write_atomically(fs::path(spec.out_dir) / ("trace_" + std::to_string(r) + ".csv"), csv.str(), written);
      }
      write_atomically(fs::path(spec.out_dir) / "summary.json",
                       summary_json(report, spec.timing).dump(2) + "\n", written);
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) fs::remove(p, ec);
      throw;
    }
  }
  return report;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "xi") return SweepAxis::xi;
  if (name == "min_mesh" || name == "min-mesh") return SweepAxis::min_mesh;
  if (name == "x0") return SweepAxis::x0;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::xi: return "xi";
    case SweepAxis::min_mesh: return "min_mesh";
    case SweepAxis::x0: return "x0";
  }
  return "unknown";
}

std::vector<std::string> preset_sweep_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::xi: return {"0.25", "0.5", "0.75", "0.9"};
    case SweepAxis::min_mesh: return {"9e-1", "9e-3", "9e-7"};
    case SweepAxis::x0:
      return {"0.5:0.5",     "50:50",       "90:90",       "1:90",        "90:1",
              "70.93:75.21", "50.60:64.29", "25.21:79.05", "89.59:13.49", "2.37:57.91"};
  }
  return {};
}

std::vector<SweepEntry> sweep(const ExperimentSpec& spec, SweepAxis axis,
                              const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  std::vector<SweepEntry> entries;
  auto combined = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepEntry e;
    e.value = values[i];
    nlohmann::ordered_json j;
    j["axis"] = std::string(to_string(axis));
    j["value"] = e.value;
    try {
      ExperimentSpec s = spec;
      std::string v = values[i];
      std::replace(v.begin(), v.end(), ':', ',');
      switch (axis) {
        case SweepAxis::xi: s.xi = parse_double(trim(v), "xi"); break;
        case SweepAxis::min_mesh: s.min_mesh = parse_point(v); break;
        case SweepAxis::x0: s.x0 = parse_point(v); break;
      }
      if (!spec.out_dir.empty()) {
        s.out_dir = (fs::path(spec.out_dir) / (std::string(to_string(axis)) + "_" + std::to_string(i))).string();
      }
      RunReport rep = run(s);
      j["summary"] = summary_json(rep, spec.timing);
      e.row = std::move(rep.summary);
    } catch (const std::exception& ex) {
      e.error = ex.what();
      j["error"] = e.error;
    }
    combined.push_back(std::move(j));
    entries.push_back(std::move(e));
  }
  if (!spec.out_dir.empty()) {
    std::vector<fs::path> written;
    fs::create_directories(spec.out_dir);
    write_atomically(fs::path(spec.out_dir) / "sweep.json", combined.dump(2) + "\n", written);
  }
  return entries;
}

TieRule parse_tie_rule(std::string_view name) {
  if (name == "average") return TieRule::average;
  if (name == "competition" || name == "min") return TieRule::competition;
  if (name == "dense") return TieRule::dense;
  throw ConfigError("unknown tie rule '" + std::string(name) + "'");
}

std::vector<double> rank_values(std::span<const double> values, bool higher_is_better, TieRule rule) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t group = 0;
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s + 1;
    while (e < n && values[order[e]] == values[order[s]]) ++e;
    ++group;
    double r = 0.0;
    switch (rule) {
      case TieRule::average: r = 0.5 * static_cast<double>(s + 1 + e); break;
      case TieRule::competition: r = static_cast<double>(s + 1); break;
      case TieRule::dense: r = static_cast<double>(group); break;
    }
    for (std::size_t k = s; k < e; ++k) ranks[order[k]] = r;
    s = e;
  }
  return ranks;
}

Ranking rank(std::span<const ScoreRow> rows, TieRule rule) {
  Ranking out;
  std::vector<std::string> datasets;
  std::map<std::pair<std::string, std::string>, const ScoreRow*> cells;
  for (const auto& r : rows) {
    if (std::find(out.methods.begin(), out.methods.end(), r.method) == out.methods.end()) out.methods.push_back(r.method);
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (!cells.emplace(std::pair{r.method, r.dataset}, &r).second) {
      throw ConfigError("rank: duplicate score for " + r.method + " on " + r.dataset);
    }
  }
  if (datasets.empty()) throw ConfigError("rank: no scores");
  const std::size_t m = out.methods.size();
  for (auto* col : {&out.best_mean, &out.worst_mean, &out.best_max}) col->average_rank.assign(m, 0.0);

  for (const auto& d : datasets) {
    std::vector<double> mean(m), max(m);
    for (std::size_t k = 0; k < m; ++k) {
      auto it = cells.find({out.methods[k], d});
      if (it == cells.end()) throw ConfigError("rank: no score for " + out.methods[k] + " on " + d);
      mean[k] = it->second->mean;
      max[k] = it->second->max;
    }
    const auto a = rank_values(mean, true, rule);
    const auto b = rank_values(mean, false, rule);
    const auto c = rank_values(max, true, rule);
    for (std::size_t k = 0; k < m; ++k) {
      out.best_mean.average_rank[k] += a[k];
      out.worst_mean.average_rank[k] += b[k];
      out.best_max.average_rank[k] += c[k];
    }
  }
  const double nd = static_cast<double>(datasets.size());
  for (auto* col : {&out.best_mean, &out.worst_mean, &out.best_max}) {
    for (double& v : col->average_rank) v /= nd;
    const auto pos = rank_values(col->average_rank, false, TieRule::competition);
    col->position.assign(pos.begin(), pos.end());
  }
  return out;
}

std::vector<ScoreRow> read_score_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("score table is empty");
  const auto header = split(trim(line), ',');
  auto column = [&](std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw ConfigError("score table has no '" + std::string(name) + "' column");
  };
  const std::size_t cd = column("dataset"), cm = column("method"), cmean = column("mean"), cmax = column("max");
  std::vector<ScoreRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      throw ConfigError("score table line " + std::to_string(line_no) + " has the wrong number of cells");
    }
    ScoreRow r;
    r.dataset = trim(cells[cd]);
    r.method = trim(cells[cm]);
    r.mean = parse_double(trim(cells[cmean]), "mean");
    r.max = parse_double(trim(cells[cmax]), "max");
    rows.push_back(std::move(r));
  }
  return rows;
}

ScoreRow score_from_summary(const nlohmann::json& summary) {
  if (!summary.contains("accuracy") || summary["accuracy"].is_null()) {
    throw ConfigError("summary has no accuracy (no test split)");
  }
  ScoreRow r;
  r.method = summary.at("method").get<std::string>();
  r.dataset = summary.at("dataset").get<std::string>();
  r.mean = summary["accuracy"].at("mean").get<double>();
  r.max = summary["accuracy"].at("max").get<double>();
  return r;
}

void write_ranking_csv(const Ranking& ranking, std::ostream& out) {
  out << "method,best_mean_avg_rank,best_mean_position,worst_mean_avg_rank,worst_mean_position,"
         "best_max_avg_rank,best_max_position\n";
  for (std::size_t k = 0; k < ranking.methods.size(); ++k) {
    out << ranking.methods[k];
    for (const auto* col : {&ranking.best_mean, &ranking.worst_mean, &ranking.best_max}) {
      out << ',' << format_real(col->average_rank[k]) << ',' << col->position[k];
    }
    out << '\n';
  }
}

}  // namespace orthomads
