#include "orthomads/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "orthomads/types.hpp"

namespace orthomads {
namespace {

std::string format_label(double v) {
  if (v == std::trunc(v) && std::abs(v) < 1e15) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
    return std::string(buf, res.ptr);
  }
  return format_real(v);
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (int c : labels) ++counts[static_cast<std::size_t>(c)];
  return counts;
}

void Dataset::validate() const {
  if (features.size() != rows * cols) throw std::invalid_argument("dataset: feature shape mismatch");
  if (labels.size() != rows || weights.size() != rows) {
    throw std::invalid_argument("dataset: labels or weights do not match the row count");
  }
  if (num_classes() < 2) throw std::invalid_argument("dataset: need at least two classes");
  std::vector<bool> seen(num_classes(), false);
  for (int c : labels) {
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes()) {
      throw std::invalid_argument("dataset: class id out of range");
    }
    seen[static_cast<std::size_t>(c)] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw std::invalid_argument("dataset: need at least two classes present");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("dataset: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("dataset: weights must sum to 1");
}

Dataset parse_libsvm(std::istream& in) {
  struct Row {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tokens = split_ws(view);
    if (tokens.empty()) continue;

    Row row;
    if (!parse_real(tokens[0], row.label)) {
      throw ParseError(line_no, "label '" + std::string(tokens[0]) + "' is not numeric");
    }
    std::size_t last = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError(line_no, "malformed pair '" + std::string(tok) + "'");
      }
      std::size_t index = 0;
      const auto idx = tok.substr(0, colon);
      auto res = std::from_chars(idx.data(), idx.data() + idx.size(), index);
      if (res.ec != std::errc() || res.ptr != idx.data() + idx.size() || index < 1) {
        throw ParseError(line_no, "bad feature index '" + std::string(idx) + "'");
      }
      if (index <= last) throw ParseError(line_no, "feature indices are not increasing");
      double value = 0.0;
      if (!parse_real(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "non-numeric value '" + std::string(tok.substr(colon + 1)) + "'");
      }
      row.entries.emplace_back(index, value);
      last = index;
    }
    width = std::max(width, last);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no, "no instances");

  Dataset data;
  data.rows = rows.size();
  data.cols = width;
  data.features.assign(data.rows * data.cols, 0.0);
  std::map<double, int> ids;
  for (const auto& r : rows) ids.emplace(r.label, 0);
  for (auto& [label, id] : ids) {
    id = static_cast<int>(data.label_table.size());
    data.label_table.push_back(label);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [index, value] : rows[i].entries) data.features[i * width + index - 1] = value;
    data.labels.push_back(ids.at(rows[i].label));
  }
  set_uniform_weights(data);
  return data;
}

Dataset parse_libsvm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in);
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(in);
}

void serialize_libsvm(const Dataset& data, std::ostream& out) {
  bool width_written = data.cols == 0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    if (data.cols > 0 && data.row(i)[data.cols - 1] != 0.0) width_written = true;
  }
  for (std::size_t i = 0; i < data.rows; ++i) {
    out << format_label(data.label_table[static_cast<std::size_t>(data.labels[i])]);
    const double* r = data.row(i);
    for (std::size_t j = 0; j < data.cols; ++j) {
      const bool pad = !width_written && i == 0 && j + 1 == data.cols;
      if (r[j] != 0.0 || pad) out << ' ' << (j + 1) << ':' << format_real(r[j]);
    }
    out << '\n';
  }
}

std::string serialize_libsvm(const Dataset& data) {
  std::ostringstream out;
  serialize_libsvm(data, out);
  return out.str();
}

void set_uniform_weights(Dataset& data) {
  data.weights.assign(data.rows, data.rows > 0 ? 1.0 / static_cast<double>(data.rows) : 0.0);
}

Dataset subset(const Dataset& data, std::span<const std::size_t> index) {
  Dataset s;
  s.rows = index.size();
  s.cols = data.cols;
  s.label_table = data.label_table;
  s.features.reserve(s.rows * s.cols);
  double total = 0.0;
  for (std::size_t i : index) {
    s.features.insert(s.features.end(), data.row(i), data.row(i) + data.cols);
    s.labels.push_back(data.labels[i]);
    s.weights.push_back(data.weights[i]);
    total += data.weights[i];
  }
  for (double& w : s.weights) w /= total;
  return s;
}

void harmonize(Dataset& reference, Dataset& other) {
  const std::size_t width = std::max(reference.cols, other.cols);
  auto pad = [width](Dataset& d) {
    if (d.cols == width) return;
    std::vector<double> f(d.rows * width, 0.0);
    for (std::size_t i = 0; i < d.rows; ++i) std::copy(d.row(i), d.row(i) + d.cols, f.begin() + i * width);
    d.features = std::move(f);
    d.cols = width;
  };
  pad(reference);
  pad(other);

  std::vector<int> remap(other.label_table.size());
  for (std::size_t c = 0; c < other.label_table.size(); ++c) {
    auto it = std::find(reference.label_table.begin(), reference.label_table.end(), other.label_table[c]);
    if (it == reference.label_table.end()) {
      throw std::invalid_argument("label " + format_label(other.label_table[c]) +
                                  " does not occur in the training data");
    }
    remap[c] = static_cast<int>(it - reference.label_table.begin());
  }
  for (int& l : other.labels) l = remap[static_cast<std::size_t>(l)];
  other.label_table = reference.label_table;
}

std::vector<int> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
  if (k > labels.size()) throw std::invalid_argument("stratified_kfold: more folds than instances");
  int top = 0;
  for (int c : labels) {
    if (c < 0) throw std::invalid_argument("stratified_kfold: negative class id");
    top = std::max(top, c);
  }
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(top) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  std::size_t offset = 0;
  for (auto& m : members) {
    std::shuffle(m.begin(), m.end(), rng);
    for (std::size_t p = 0; p < m.size(); ++p) fold[m[p]] = static_cast<int>((offset + p) % k);
    offset = (offset + m.size()) % k;
  }
  return fold;
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "blobs") return SyntheticKind::blobs;
  if (name == "two_moons" || name == "moons") return SyntheticKind::two_moons;
  if (name == "double_ring" || name == "rings") return SyntheticKind::double_ring;
  throw std::invalid_argument("unknown synthetic kind '" + std::string(name) + "'");
}

Dataset make_synthetic(SyntheticKind kind, std::span<const std::size_t> sizes, double noise,
                       std::uint64_t seed) {
  if (sizes.size() < 2) throw std::invalid_argument("make_synthetic: need at least two classes");
  if (kind != SyntheticKind::blobs && sizes.size() != 2) {
    throw std::invalid_argument("make_synthetic: two_moons and double_ring have two classes");
  }
  for (std::size_t s : sizes) {
    if (s < 4) throw std::invalid_argument("make_synthetic: need at least 4 instances per class");
  }
  if (!(noise >= 0.0)) throw std::invalid_argument("make_synthetic: noise must be non-negative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double pi = std::numbers::pi;

  Dataset d;
  d.cols = 2;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    d.label_table.push_back(static_cast<double>(c));
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      double x = 0.0, y = 0.0;
      switch (kind) {
        case SyntheticKind::blobs: {
          const double angle = 2.0 * pi * static_cast<double>(c) / static_cast<double>(sizes.size());
          x = 2.0 * std::cos(angle) + noise * gauss(rng);
          y = 2.0 * std::sin(angle) + noise * gauss(rng);
          break;
        }
        case SyntheticKind::two_moons: {
          const double t = pi * unit(rng);
          if (c == 0) {
            x = std::cos(t);
            y = std::sin(t);
          } else {
            x = 1.0 - std::cos(t);
            y = 0.5 - std::sin(t);
          }
          x += noise * gauss(rng);
          y += noise * gauss(rng);
          break;
        }
        case SyntheticKind::double_ring: {
          const double t = 2.0 * pi * unit(rng);
          const double r = (c == 0 ? 1.0 : 2.0) + noise * gauss(rng);
          x = r * std::cos(t);
          y = r * std::sin(t);
          break;
        }
      }
      d.features.push_back(x);
      d.features.push_back(y);
      d.labels.push_back(static_cast<int>(c));
    }
  }
  d.rows = d.labels.size();
  set_uniform_weights(d);
  return d;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& data) {
  MinMaxScaler s;
  s.low.assign(data.cols, 0.0);
  s.span.assign(data.cols, 1.0);
  for (std::size_t j = 0; j < data.cols; ++j) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < data.rows; ++i) {
      lo = std::min(lo, data.row(i)[j]);
      hi = std::max(hi, data.row(i)[j]);
    }
    if (data.rows == 0) lo = hi = 0.0;
    s.low[j] = lo;
    s.span[j] = hi > lo ? hi - lo : 1.0;
  }
  return s;
}

void MinMaxScaler::apply(Dataset& data) const {
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < data.cols; ++j) {
      double& v = data.features[i * data.cols + j];
      v = (v - low[j]) / span[j];
    }
  }
}

}  // namespace orthomads
