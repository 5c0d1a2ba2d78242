#include "orthomads/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orthomads {
namespace {

// Keeps every product q_i q_j exactly representable in a double.
constexpr double kMaxLatticeEntry = 1099511627776.0;  // 2^40

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

unsigned nth_prime(std::size_t n) {
  unsigned candidate = 1;
  std::size_t found = 0;
  while (found <= n) {
    ++candidate;
    bool prime = true;
    for (unsigned d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) ++found;
  }
  return candidate;
}

void refresh_mesh(MeshState& s) {
  for (std::size_t j = 0; j < s.frame.size(); ++j) {
    s.mesh[j] = std::min(s.frame[j], s.frame[j] * s.frame[j]);
  }
}

}  // namespace

double MeshState::mesh_ratio() const {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < frame.size(); ++j) r = std::min(r, frame[j] / mesh[j]);
  return std::max(1.0, r);
}

MeshState initial_sizes(const Bounds& bounds, double shrink) {
  bounds.validate();
  Point frame = bounds.width();
  for (double& f : frame) f /= 10.0;
  return initial_sizes(frame, shrink);
}

MeshState initial_sizes(const Point& initial_frame, double shrink) {
  if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("mesh: shrink factor must lie in (0, 1)");
  for (double f : initial_frame) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("mesh: initial frame must be positive");
  }
  MeshState s;
  s.frame = initial_frame;
  s.mesh = initial_frame;
  s.shrink = shrink;
  s.initial_frame = initial_frame;
  return s;
}

MeshState update_after_iteration(const MeshState& state, bool succeeded) {
  MeshState next = state;
  for (std::size_t j = 0; j < next.frame.size(); ++j) {
    if (succeeded) {
      next.frame[j] = std::min(next.frame[j] / next.shrink, next.initial_frame[j]);
    } else {
      next.frame[j] = next.frame[j] * next.shrink;
    }
  }
  refresh_mesh(next);
  return next;
}

Point snap_to_mesh(std::span<const double> x, std::span<const double> center,
                   const MeshState& state, const Bounds& bounds) {
  Point p(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double step = state.mesh[j];
    double k = std::round((x[j] - center[j]) / step);
    double v = center[j] + k * step;
    if (v > bounds.upper[j]) {
      k = std::floor((bounds.upper[j] - center[j]) / step);
      v = center[j] + k * step;
      while (v > bounds.upper[j]) v = center[j] + (--k) * step;
    } else if (v < bounds.lower[j]) {
      k = std::ceil((bounds.lower[j] - center[j]) / step);
      v = center[j] + k * step;
      while (v < bounds.lower[j]) v = center[j] + (++k) * step;
    }
    p[j] = v;
  }
  return p;
}

bool on_mesh(std::span<const double> p, std::span<const double> center,
             std::span<const double> mesh, double tol) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double k = (p[j] - center[j]) / mesh[j];
    if (std::abs(k - std::round(k)) > tol * std::max(1.0, std::abs(k))) return false;
  }
  return true;
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

Point halton(std::uint64_t index, std::size_t n) {
  Point u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = radical_inverse(index, nth_prime(j));
  return u;
}

DirectionSet ortho_directions(std::uint64_t iteration, std::size_t n, std::uint64_t seed,
                              double max_entry) {
  if (n == 0) throw ConfigError("ortho_directions: dimension must be at least 1");
  const std::uint64_t index = 1 + iteration + splitmix64(seed) % 99991ULL;

  Point w = halton(index, n);
  double norm = 0.0;
  for (double& v : w) {
    v = 2.0 * v - 1.0;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm < 1e-12) {
    std::fill(w.begin(), w.end(), 0.0);
    w[0] = 1.0;
    norm = 1.0;
  }
  for (double& v : w) v /= norm;

  // Largest lattice direction along w whose squared norm fits the budget.
  const double budget = std::clamp(std::floor(max_entry), 1.0, kMaxLatticeEntry);
  Point q(n, 0.0);
  double q_norm2 = 0.0;
  for (double alpha = std::sqrt(budget); alpha >= 0.5; alpha *= 0.97) {
    q_norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      q[j] = std::round(alpha * w[j]);
      q_norm2 += q[j] * q[j];
    }
    if (q_norm2 > 0.0 && q_norm2 <= budget) break;
  }
  if (!(q_norm2 > 0.0 && q_norm2 <= budget)) {
    std::size_t k = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (std::abs(w[j]) > std::abs(w[k])) k = j;
    }
    std::fill(q.begin(), q.end(), 0.0);
    q[k] = w[k] < 0.0 ? -1.0 : 1.0;
    q_norm2 = 1.0;
  }

  DirectionSet set;
  set.directions.resize(2 * n, Point(n));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      const double h = (r == c ? q_norm2 : 0.0) - 2.0 * q[r] * q[c];
      set.directions[c][r] = h;
      set.directions[n + c][r] = -h;
      set.frame_bound = std::max(set.frame_bound, std::abs(h));
    }
  }
  return set;
}

DirectionSet poll_directions(std::uint64_t iteration, std::uint64_t seed, const MeshState& state) {
  return ortho_directions(iteration, state.dimension(), seed, state.mesh_ratio());
}

bool frame_membership(std::span<const double> p, std::span<const double> center,
                      const MeshState& state, const DirectionSet& dirs) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double radius = state.frame[j] * dirs.frame_bound;
    // Slack of a few ulps of the coordinates: p - center is computed, not exact.
    const double slack = 1e-12 * std::max({std::abs(p[j]), std::abs(center[j]), radius});
    if (std::abs(p[j] - center[j]) > radius + slack) return false;
  }
  return true;
}

}  // namespace orthomads
