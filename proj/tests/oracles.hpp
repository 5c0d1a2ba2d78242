#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace oracle {

// Dense RBF Gram matrix with labels folded in: Q_ij = y_i y_j exp(-g ||x_i - x_j||^2).
inline std::vector<double> signed_gram(const std::vector<double>& x, std::size_t rows, std::size_t cols,
                                       const std::vector<int>& y, double gamma) {
  std::vector<double> q(rows * rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < rows; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < cols; ++k) {
        const double t = x[i * cols + k] - x[j * cols + k];
        d += t * t;
      }
      q[i * rows + j] = y[i] * y[j] * std::exp(-gamma * d);
    }
  }
  return q;
}

inline double dual_value(const std::vector<double>& q, std::span<const double> a) {
  const std::size_t d = a.size();
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < d; ++j) quad += a[i] * q[i * d + j] * a[j];
  }
  return lin - 0.5 * quad;
}

// Solves A z = b in place by Gaussian elimination; false when singular.
inline bool solve(std::vector<double> a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    }
    if (std::abs(a[p * n + c]) < 1e-13) return false;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[p * n + k], a[c * n + k]);
      std::swap(b[p], b[c]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) b[c] /= a[c * n + c];
  return true;
}

struct DualOptimum {
  std::vector<double> alpha;
  double value = -std::numeric_limits<double>::infinity();
};

// Exact maximizer of sum(a) - a^T Q a / 2 over 0 <= a <= C, y^T a = 0 by
// enumerating all 3^d assignments (at 0, at C, free) and solving the KKT
// system of the free block.
inline DualOptimum dual_active_set(const std::vector<double>& q, const std::vector<int>& y, double C) {
  const std::size_t d = y.size();
  DualOptimum best;
  std::vector<int> state(d, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < d; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
    }
    std::vector<double> a(d, 0.0);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < d; ++i) {
      if (state[i] == 1) a[i] = C;
      if (state[i] == 2) free.push_back(i);
    }
    const double tol = 1e-9 * std::max(1.0, C);
    if (free.empty()) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += y[i] * a[i];
      if (std::abs(s) > tol) continue;
    } else {
      const std::size_t f = free.size();
      std::vector<double> m((f + 1) * (f + 1), 0.0), rhs(f + 1, 0.0);
      for (std::size_t r = 0; r < f; ++r) {
        const std::size_t i = free[r];
        double fixed = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          if (state[j] == 1) fixed += q[i * d + j] * a[j];
        }
        for (std::size_t s = 0; s < f; ++s) m[r * (f + 1) + s] = q[i * d + free[s]];
        m[r * (f + 1) + f] = y[i];
        m[f * (f + 1) + r] = y[i];
        rhs[r] = 1.0 - fixed;
      }
      double fixed_sum = 0.0;
      for (std::size_t j = 0; j < d; ++j) fixed_sum += y[j] * a[j];
      rhs[f] = -fixed_sum;
      if (!solve(m, rhs)) continue;
      bool feasible = true;
      for (std::size_t r = 0; r < f; ++r) {
        if (rhs[r] < -tol || rhs[r] > C + tol) feasible = false;
        a[free[r]] = std::clamp(rhs[r], 0.0, C);
      }
      if (!feasible) continue;
    }
    const double v = dual_value(q, a);
    if (v > best.value) {
      best.value = v;
      best.alpha = a;
    }
  }
  return best;
}

// Grid maximization of the dual after eliminating the last variable through
// the equality constraint; the grid is re-centered on the best cell and
// halved each level.
inline double dual_fine_grid(const std::vector<double>& q, const std::vector<int>& y, double C,
                             std::size_t points_per_axis, std::size_t levels) {
  const std::size_t d = y.size();
  const std::size_t m = d - 1;
  std::vector<double> lo(m, 0.0), hi(m, C);
  std::vector<double> a(d), best_a(d);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= points_per_axis;
  for (std::size_t level = 0; level < levels; ++level) {
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(c % points_per_axis) / static_cast<double>(points_per_axis - 1);
        c /= points_per_axis;
        a[i] = lo[i] + t * (hi[i] - lo[i]);
        s += y[i] * a[i];
      }
      a[m] = -y[m] * s;
      if (a[m] < -1e-12 * C || a[m] > C * (1 + 1e-12)) continue;
      a[m] = std::clamp(a[m], 0.0, C);
      const double v = dual_value(q, a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double half = 0.5 * (hi[i] - lo[i]) * 0.5;
      lo[i] = std::max(0.0, best_a[i] - half);
      hi[i] = std::min(C, best_a[i] + half);
    }
  }
  return best;
}

inline double hinge(std::span<const double> margins, std::span<const double> weights) {
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const long double loss = margins[i] < 1.0 ? 1.0L - margins[i] : 0.0L;
    num += static_cast<long double>(weights[i]) * loss;
    den += weights[i];
  }
  return static_cast<double>(num / den);
}

// Ranks by counting: average = 1 + #better + (#equal - 1) / 2,
// competition = 1 + #better, dense = 1 + #distinct better values.
inline std::vector<double> ranks(const std::vector<double>& v, bool higher_is_better, int rule) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t better = 0, equal = 0;
    std::vector<double> distinct;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const bool b = higher_is_better ? v[j] > v[i] : v[j] < v[i];
      if (b) {
        ++better;
        if (std::find(distinct.begin(), distinct.end(), v[j]) == distinct.end()) distinct.push_back(v[j]);
      }
      if (v[j] == v[i]) ++equal;
    }
    if (rule == 0) out[i] = 1.0 + static_cast<double>(better) + (static_cast<double>(equal) - 1.0) / 2.0;
    if (rule == 1) out[i] = 1.0 + static_cast<double>(better);
    if (rule == 2) out[i] = 1.0 + static_cast<double>(distinct.size());
  }
  return out;
}

}  // namespace oracle
