#pragma once

// Nelder-Mead simplex search stage run on the current mesh.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "orthomads/evaluator.hpp"
#include "orthomads/mesh.hpp"
#include "orthomads/types.hpp"

namespace orthomads {

struct NmConfig {
  double expansion = 2.0;          // Q_e
  double outside_contraction = 0.5;
  double inside_contraction = 0.5;
  double shrink = 0.5;             // zeta
  std::size_t max_evals_per_stage = 0;  // 0 means 4n
  // Use the printed constant signs, which swap the two contraction points.
  bool literal_contraction_signs = false;

  void validate() const;
};

struct Vertex {
  Point x;
  double value = 0.0;
  std::size_t order = 0;  // insertion index, breaks value ties
};

struct Simplex {
  std::vector<Vertex> vertices;  // n + 1, sorted by (value, order)
  std::size_t next_order = 0;

  void add(Point x, double value);
  void sort();
  std::size_t dimension() const { return vertices.empty() ? 0 : vertices.front().x.size(); }
  std::vector<double> values() const;
};

enum class Zone { inside_contraction, expansion, reflection, outside_contraction };

std::string_view to_string(Zone zone);

/// x_new when it strictly dominates x, else x.
const Vertex& best(const Vertex& x_new, const Vertex& x);

/// Mean of all vertices except the worst.
Point centroid(const Simplex& simplex);

struct Candidates {
  Point reflection;
  Point expansion;
  Point outside_contraction;
  Point inside_contraction;
};

Candidates candidates(std::span<const double> x_c, std::span<const double> x_n, const NmConfig& cfg);

/// Number of entries of `values` strictly larger than f_r.
std::size_t dominated_count(double f_r, std::span<const double> values);

/// Zone of the reflected point given the sorted vertex values.
Zone classify_zone(double f_r, std::span<const double> sorted_values);

/// Absolute determinant of the edge matrix (x_i - x_0), i = 1..n.
double simplex_volume(const Simplex& simplex);

/// Evaluates a raw candidate; returns the point actually evaluated
/// (after snapping) and its value.
using CandidateEvaluator = std::function<std::pair<Point, double>(const Point&)>;

struct NmStepResult {
  Zone zone = Zone::outside_contraction;
  bool shrunk = false;
};

/// One Nelder-Mead replacement of the worst vertex (or a shrink).
NmStepResult nm_step(Simplex& simplex, const CandidateEvaluator& eval, const NmConfig& cfg);

/// Picks up to n+1 affinely independent cached points for the start simplex:
/// best values first among points within 2 * frame of the incumbent, then
/// the best of the remaining ones. Returns fewer when not enough exist.
Simplex initial_simplex(const RunTrace& trace, std::span<const double> incumbent,
                        const MeshState& state);

struct SearchOutcome {
  bool improved = false;
  Incumbent point;
};

/// NM search stage: snaps every candidate to the mesh around the incumbent,
/// stops after the stage budget or on a degenerate simplex.
SearchOutcome nm_search_stage(Evaluator& evaluator, const Incumbent& incumbent,
                              const MeshState& state, const NmConfig& cfg);

}  // namespace orthomads
