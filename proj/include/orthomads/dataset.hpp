#pragma once

// Datasets: LIBSVM text format, stratified folds, synthetic generators.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace orthomads {

/// Dense instances with contiguous class ids and per-instance weights.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;     // row-major, rows * cols
  std::vector<int> labels;          // class ids in [0, num_classes())
  std::vector<double> weights;      // sums to 1
  std::vector<double> label_table;  // original label of each class id

  const double* row(std::size_t i) const { return features.data() + i * cols; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
  std::size_t num_classes() const { return label_table.size(); }
  std::vector<std::size_t> class_counts() const;

  /// Throws std::invalid_argument on shape mismatches, fewer than two
  /// classes, or weights that are not positive and normalized.
  void validate() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// "<label> <idx>:<val> ..." per line, 1-based increasing indices. Blank
/// lines and '#' suffixes are ignored. Width is the largest index seen.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(std::string_view text);
Dataset load_libsvm(const std::string& path);

/// Inverse of parse_libsvm with round-trip exact values. Zero features are
/// omitted except where needed to keep the width.
void serialize_libsvm(const Dataset& data, std::ostream& out);
std::string serialize_libsvm(const Dataset& data);

/// Uniform weights 1/rows.
void set_uniform_weights(Dataset& data);

/// Rows `index` of `data`, weights renormalized, class table kept.
Dataset subset(const Dataset& data, std::span<const std::size_t> index);

/// Re-expresses `other` in the class ids and width of `reference`. Labels
/// missing from the reference table are an error; widths are padded.
void harmonize(Dataset& reference, Dataset& other);

/// Fold id per instance: each class is shuffled and dealt round-robin, the
/// dealing position carrying over from one class to the next.
std::vector<int> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

enum class SyntheticKind { blobs, two_moons, double_ring };

SyntheticKind parse_synthetic_kind(std::string_view name);

/// `sizes` holds the instance count per class (two_moons and double_ring
/// take exactly two). Labels are 0..K-1.
Dataset make_synthetic(SyntheticKind kind, std::span<const std::size_t> sizes, double noise,
                       std::uint64_t seed);

/// Per-feature min-max map to [0, 1], fitted on one dataset.
struct MinMaxScaler {
  std::vector<double> low;
  std::vector<double> span;

  static MinMaxScaler fit(const Dataset& data);
  void apply(Dataset& data) const;
};

}  // namespace orthomads
