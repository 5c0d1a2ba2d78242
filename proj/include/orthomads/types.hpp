#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace orthomads {

using Point = std::vector<double>;

/// Raised when a configuration or input violates a documented precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box L <= x <= U.
struct Bounds {
  Point lower;
  Point upper;

  Bounds() = default;
  Bounds(Point lo, Point hi);

  std::size_t dimension() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  Point width() const;
  Point midpoint() const;

  /// Throws ConfigError unless lower[j] < upper[j] for all j and n >= 1.
  void validate() const;
};

enum class Stage { initial, nm_search, vns_search, poll, baseline };

enum class TerminalReason { mesh_converged, budget_exhausted, target_reached };

std::string_view to_string(Stage stage);
std::string_view to_string(TerminalReason reason);

/// L-infinity distance between two points of equal dimension.
double linf_distance(std::span<const double> a, std::span<const double> b);

/// Expands a one-element vector to `n` copies; returns it unchanged when it
/// already has `n` entries. Anything else is a ConfigError.
Point broadcast(const Point& values, std::size_t n, std::string_view what);

/// Locale-independent text with 17 significant digits (round-trips exactly).
std::string format_real(double v);

}  // namespace orthomads
