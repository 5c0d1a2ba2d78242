#include "orthomads/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace orthomads {

Bounds::Bounds(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
  }
  return true;
}

Point Bounds::width() const {
  Point w(lower.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = upper[j] - lower[j];
  return w;
}

Point Bounds::midpoint() const {
  Point m(lower.size());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = 0.5 * (lower[j] + upper[j]);
  return m;
}

void Bounds::validate() const {
  if (lower.empty()) throw ConfigError("bounds: dimension must be at least 1");
  if (lower.size() != upper.size()) {
    throw ConfigError("bounds: lower and upper have different dimensions");
  }
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !(lower[j] < upper[j])) {
      throw ConfigError("bounds: need finite lower[" + std::to_string(j) + "] < upper[" +
                        std::to_string(j) + "]");
    }
  }
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::initial: return "initial";
    case Stage::nm_search: return "nm_search";
    case Stage::vns_search: return "vns_search";
    case Stage::poll: return "poll";
    case Stage::baseline: return "baseline";
  }
  return "unknown";
}

std::string_view to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::mesh_converged: return "mesh_converged";
    case TerminalReason::budget_exhausted: return "budget_exhausted";
    case TerminalReason::target_reached: return "target_reached";
  }
  return "unknown";
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

Point broadcast(const Point& values, std::size_t n, std::string_view what) {
  if (values.size() == n) return values;
  if (values.size() == 1) return Point(n, values.front());
  throw ConfigError(std::string(what) + ": expected 1 or " + std::to_string(n) + " values, got " +
                    std::to_string(values.size()));
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace orthomads
