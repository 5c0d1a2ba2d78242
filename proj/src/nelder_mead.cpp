#include "orthomads/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace orthomads {
namespace {

constexpr double kDegenerateVolume = 1e-12;

struct StageCapReached {};

// True when v is outside span(basis), by Gram-Schmidt with a relative tolerance.
bool independent_of(const std::vector<Point>& basis, Point v, double scale) {
  for (const Point& b : basis) {
    const double bb = std::inner_product(b.begin(), b.end(), b.begin(), 0.0);
    const double vb = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= vb / bb * b[j];
  }
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  return norm > 1e-9 * scale;
}

}  // namespace

void NmConfig::validate() const {
  if (!(expansion > 1.0)) throw ConfigError("nm: expansion coefficient must exceed 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("nm: shrink must lie in (0, 1)");
  if (!(outside_contraction > 0.0 && outside_contraction < 1.0) ||
      !(inside_contraction > 0.0 && inside_contraction < 1.0)) {
    throw ConfigError("nm: contraction coefficients must lie in (0, 1)");
  }
}

void Simplex::add(Point x, double value) {
  vertices.push_back({std::move(x), value, next_order++});
}

void Simplex::sort() {
  std::sort(vertices.begin(), vertices.end(), [](const Vertex& a, const Vertex& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.order < b.order;
  });
}

std::vector<double> Simplex::values() const {
  std::vector<double> v;
  v.reserve(vertices.size());
  for (const auto& vx : vertices) v.push_back(vx.value);
  return v;
}

std::string_view to_string(Zone zone) {
  switch (zone) {
    case Zone::inside_contraction: return "inside_contraction";
    case Zone::expansion: return "expansion";
    case Zone::reflection: return "reflection";
    case Zone::outside_contraction: return "outside_contraction";
  }
  return "unknown";
}

const Vertex& best(const Vertex& x_new, const Vertex& x) {
  return x_new.value < x.value ? x_new : x;
}

Point centroid(const Simplex& simplex) {
  const std::size_t n = simplex.dimension();
  Point c(n, 0.0);
  for (std::size_t i = 0; i + 1 < simplex.vertices.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) c[j] += simplex.vertices[i].x[j];
  }
  for (double& v : c) v /= static_cast<double>(simplex.vertices.size() - 1);
  return c;
}

Candidates candidates(std::span<const double> x_c, std::span<const double> x_n, const NmConfig& cfg) {
  const std::size_t n = x_c.size();
  auto along = [&](double q) {
    Point p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = x_c[j] + q * (x_c[j] - x_n[j]);
    return p;
  };
  Candidates c;
  c.reflection = along(1.0);
  c.expansion = along(cfg.expansion);
  if (cfg.literal_contraction_signs) {
    c.outside_contraction = along(-cfg.outside_contraction);
    c.inside_contraction = along(cfg.inside_contraction);
  } else {
    c.outside_contraction = along(cfg.outside_contraction);
    c.inside_contraction = along(-cfg.inside_contraction);
  }
  return c;
}

std::size_t dominated_count(double f_r, std::span<const double> values) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return f_r < v; }));
}

Zone classify_zone(double f_r, std::span<const double> sorted_values) {
  if (sorted_values.back() < f_r) return Zone::inside_contraction;
  if (f_r < sorted_values.front()) return Zone::expansion;
  if (dominated_count(f_r, sorted_values) >= 2) return Zone::reflection;
  return Zone::outside_contraction;
}

double simplex_volume(const Simplex& simplex) {
  const std::size_t n = simplex.dimension();
  if (simplex.vertices.size() != n + 1) return 0.0;
  std::vector<Point> a(n, Point(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = simplex.vertices[i + 1].x[j] - simplex.vertices[0].x[j];
    }
  }
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) std::swap(a[piv], a[col]);
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return std::abs(det);
}

NmStepResult nm_step(Simplex& simplex, const CandidateEvaluator& eval, const NmConfig& cfg) {
  simplex.sort();
  const std::size_t n = simplex.dimension();
  const Point x_c = centroid(simplex);
  const Vertex worst = simplex.vertices[n];
  const Candidates cand = candidates(x_c, worst.x, cfg);

  auto make = [&](const Point& raw) {
    auto [x, f] = eval(raw);
    return Vertex{std::move(x), f, 0};
  };
  auto replace_worst = [&](const Vertex& v) {
    simplex.vertices[n] = {v.x, v.value, simplex.next_order++};
  };

  NmStepResult result;
  const Vertex r = make(cand.reflection);
  const std::vector<double> values = simplex.values();
  result.zone = classify_zone(r.value, values);
  switch (result.zone) {
    case Zone::expansion: {
      const Vertex e = make(cand.expansion);
      replace_worst(best(r, e));
      break;
    }
    case Zone::reflection:
      replace_worst(r);
      break;
    case Zone::outside_contraction: {
      const Vertex oc = make(cand.outside_contraction);
      replace_worst(best(r, oc));
      break;
    }
    case Zone::inside_contraction: {
      const Vertex ic = make(cand.inside_contraction);
      if (ic.value < worst.value) {
        replace_worst(ic);
      } else {
        result.shrunk = true;
        const Point x0 = simplex.vertices[0].x;
        for (std::size_t i = 1; i <= n; ++i) {
          Point raw(n);
          for (std::size_t j = 0; j < n; ++j) {
            raw[j] = x0[j] + cfg.shrink * (simplex.vertices[i].x[j] - x0[j]);
          }
          const Vertex s = make(raw);
          simplex.vertices[i] = {s.x, s.value, simplex.next_order++};
        }
      }
      break;
    }
  }
  simplex.sort();
  return result;
}

Simplex initial_simplex(const RunTrace& trace, std::span<const double> incumbent,
                        const MeshState& state) {
  const std::size_t n = incumbent.size();
  std::vector<const TraceRecord*> near, far;
  for (const auto& rec : trace.records) {
    if (!std::isfinite(rec.value)) continue;
    bool inside = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(rec.point[j] - incumbent[j]) > 2.0 * state.frame[j]) inside = false;
    }
    (inside ? near : far).push_back(&rec);
  }
  auto by_value = [](const TraceRecord* a, const TraceRecord* b) {
    if (a->value != b->value) return a->value < b->value;
    return a->eval_index < b->eval_index;
  };
  std::stable_sort(near.begin(), near.end(), by_value);
  std::stable_sort(far.begin(), far.end(), by_value);

  double scale = 0.0;
  for (double f : state.frame) scale = std::max(scale, f);

  Simplex s;
  std::vector<Point> edges;
  auto consider = [&](const TraceRecord* rec) {
    if (s.vertices.size() == n + 1) return;
    if (s.vertices.empty()) {
      s.add(rec->point, rec->value);
      return;
    }
    Point e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = rec->point[j] - s.vertices.front().x[j];
    if (independent_of(edges, e, scale)) {
      edges.push_back(std::move(e));
      s.add(rec->point, rec->value);
    }
  };
  for (const auto* rec : near) consider(rec);
  for (const auto* rec : far) consider(rec);
  s.sort();
  return s;
}

SearchOutcome nm_search_stage(Evaluator& evaluator, const Incumbent& incumbent,
                              const MeshState& state, const NmConfig& cfg) {
  cfg.validate();
  const std::size_t n = incumbent.point.size();
  SearchOutcome out;
  out.point = incumbent;

  Simplex simplex = initial_simplex(evaluator.trace(), incumbent.point, state);
  if (simplex.vertices.size() < n + 1) return out;
  const double start_volume = simplex_volume(simplex);
  if (!(start_volume > 0.0)) return out;

  const std::size_t cap = cfg.max_evals_per_stage > 0 ? cfg.max_evals_per_stage : 4 * n;
  std::size_t calls = 0;
  CandidateEvaluator eval = [&](const Point& raw) {
    if (calls >= cap) throw StageCapReached{};
    ++calls;
    Point x = snap_to_mesh(raw, incumbent.point, state, evaluator.bounds());
    const double f = evaluator.evaluate(x, Stage::nm_search);
    if (f < out.point.value) out.point = {x, f};
    return std::pair<Point, double>{std::move(x), f};
  };

  try {
    while (calls < cap) {
      nm_step(simplex, eval, cfg);
      if (simplex_volume(simplex) < kDegenerateVolume * start_volume) break;
    }
  } catch (const StageCapReached&) {
  }
  out.improved = out.point.value < incumbent.value;
  return out;
}

}  // namespace orthomads
