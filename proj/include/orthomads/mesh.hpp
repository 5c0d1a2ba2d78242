#pragma once

// Mesh and frame geometry for Ortho-MADS: size bookkeeping, snapping trial
// points onto the current mesh, and the orthogonal poll directions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "orthomads/types.hpp"

namespace orthomads {

/// Per-dimension frame (poll) size and mesh size.
///
/// Invariants: 0 < mesh[j] <= frame[j] <= initial_frame[j] and, after any
/// update, mesh[j] == min(frame[j], frame[j]^2).
struct MeshState {
  Point frame;          // Delta
  Point mesh;           // delta
  double shrink = 0.5;  // tau in (0, 1)
  Point initial_frame;  // Delta^0, also the cap on frame growth

  std::size_t dimension() const { return frame.size(); }

  /// Smallest per-dimension ratio frame/mesh; always >= 1.
  double mesh_ratio() const;
};

/// Delta^0_j = (U_j - L_j) / 10 and delta^0 = Delta^0.
MeshState initial_sizes(const Bounds& bounds, double shrink = 0.5);

/// Same as above with an explicit initial frame (still used as the cap).
MeshState initial_sizes(const Point& initial_frame, double shrink);

/// Enlarges the frame by 1/tau on success (capped at Delta^0) or shrinks it by
/// tau on failure, then recomputes the mesh size.
MeshState update_after_iteration(const MeshState& state, bool succeeded);

/// Rounds x onto the mesh centered at `center` with spacing `state.mesh`
/// (ties away from zero), then pulls each coordinate inward to the nearest
/// mesh multiple inside the bounds. `center` must be feasible.
Point snap_to_mesh(std::span<const double> x, std::span<const double> center,
                   const MeshState& state, const Bounds& bounds);

/// True when every coordinate of p is center + k * mesh[j] for an integer k.
bool on_mesh(std::span<const double> p, std::span<const double> center,
             std::span<const double> mesh, double tol = 1e-9);

/// Poll directions: columns of H followed by the columns of -H.
struct DirectionSet {
  std::vector<Point> directions;
  double frame_bound = 0.0;  // b = max ||d||_inf

  std::size_t size() const { return directions.size(); }
};

/// Van der Corput radical inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base);

/// Halton point number `index` (index >= 1) in [0, 1)^n.
Point halton(std::uint64_t index, std::size_t n);

/// Deterministic orthogonal integer directions for one iteration.
///
/// A Halton point picked by (iteration, seed) is mapped to a direction q on
/// the integer lattice with ||q||^2 <= max_entry, and the scaled Householder
/// matrix ||q||^2 I - 2 q q^T supplies n pairwise orthogonal integer columns.
/// Every entry has magnitude <= max_entry, so with max_entry equal to the
/// frame/mesh ratio the poll points x + mesh * d stay inside the frame.
DirectionSet ortho_directions(std::uint64_t iteration, std::size_t n, std::uint64_t seed,
                              double max_entry = 1.0);

/// Directions scaled for the given mesh state.
DirectionSet poll_directions(std::uint64_t iteration, std::uint64_t seed, const MeshState& state);

/// Frame test: |p_j - center_j| <= frame_j * b for every j.
bool frame_membership(std::span<const double> p, std::span<const double> center,
                      const MeshState& state, const DirectionSet& dirs);

}  // namespace orthomads
