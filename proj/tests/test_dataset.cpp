#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "orthomads/dataset.hpp"
#include "orthomads/types.hpp"

using namespace orthomads;

namespace {

std::string random_corpus(std::mt19937_64& rng, std::size_t lines) {
  const int labels[] = {-1, 1, 3, 7, -12};
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  std::ostringstream out;
  for (std::size_t i = 0; i < lines; ++i) {
    const int label = labels[rng() % 5];
    out << (label > 0 && rng() % 2 ? "+" : "") << label;
    std::size_t idx = 0;
    const std::size_t entries = rng() % 8;
    for (std::size_t e = 0; e < entries; ++e) {
      idx += 1 + rng() % 5;
      double v = mant(rng);
      switch (rng() % 4) {
        case 0: v = std::ldexp(v, expo(rng) * 3); break;
        case 1: v = std::round(v * 100); break;
        default: break;
      }
      out << (rng() % 3 == 0 ? "\t" : " ") << idx << ':' << format_real(v);
    }
    if (rng() % 20 == 0) out << "  # comment";
    out << '\n';
    if (rng() % 50 == 0) out << "\n";
  }
  return out.str();
}

bool same(const Dataset& a, const Dataset& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.labels != b.labels || a.label_table != b.label_table) return false;
  return std::memcmp(a.features.data(), b.features.data(), a.features.size() * sizeof(double)) == 0 ||
         a.features == b.features;
}

}  // namespace

TEST_CASE("parse example") {
  const auto d = parse_libsvm("1 1:0.5 3:2.0\n-1 2:1.0");
  CHECK(d.rows == 2);
  CHECK(d.cols == 3);
  CHECK(d.features == std::vector<double>{0.5, 0, 2.0, 0, 1.0, 0});
  CHECK(d.label_table == std::vector<double>{-1, 1});
  CHECK(d.labels == std::vector<int>{1, 0});
  CHECK(d.weights == std::vector<double>{0.5, 0.5});
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](std::string_view text) {
    try {
      parse_libsvm(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("3 2:1 1:1") == 1);
  CHECK(line_of("1 1:1\n2 1:x") == 2);
  CHECK(line_of("1 1:1\n\n2 1-3") == 3);
  CHECK(line_of("x 1:1") == 1);
  CHECK(line_of("1 0:1") == 1);
  CHECK(line_of("1 2:1 2:3") == 1);
  CHECK_THROWS_AS(parse_libsvm(""), ParseError);
  CHECK_THROWS_AS(parse_libsvm("# only a comment\n\n"), ParseError);
}

TEST_CASE("comments, blank lines and explicit plus labels") {
  const auto d = parse_libsvm("# header\n+1 2:3 # tail\n\n-1\n");
  CHECK(d.rows == 2);
  CHECK(d.cols == 2);
  CHECK(d.label_table == std::vector<double>{-1, 1});
}

TEST_CASE("round trip on random corpora") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    const auto a = parse_libsvm(random_corpus(rng, 200));
    const auto text = serialize_libsvm(a);
    const auto b = parse_libsvm(text);
    CHECK(same(a, b));
    CHECK(serialize_libsvm(b) == text);
  }
}

TEST_CASE("round trip keeps the width when the last column is all zero") {
  const auto a = parse_libsvm("1 1:2 4:0\n-1 2:1\n");
  CHECK(a.cols == 4);
  const auto b = parse_libsvm(serialize_libsvm(a));
  CHECK(b.cols == 4);
  CHECK(same(a, b));
}

TEST_CASE("stratified folds: examples") {
  const std::vector<int> six{0, 0, 0, 1, 1, 1};
  const auto f = stratified_kfold(six, 3, 1);
  for (int k = 0; k < 3; ++k) {
    int a = 0, b = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      if (f[i] == k) (six[i] == 0 ? a : b)++;
    }
    CHECK(a == 1);
    CHECK(b == 1);
  }
  const std::vector<int> seven(7, 0);
  const auto g = stratified_kfold(seven, 3, 9);
  std::multiset<int> sizes;
  for (int k = 0; k < 3; ++k) sizes.insert(static_cast<int>(std::count(g.begin(), g.end(), k)));
  CHECK(sizes == std::multiset<int>{2, 2, 3});
  CHECK(stratified_kfold(seven, 3, 9) == g);
  CHECK_THROWS(stratified_kfold(seven, 8, 1));
  CHECK_THROWS(stratified_kfold(seven, 1, 1));
}

TEST_CASE("stratified folds: balance property over random inputs") {
  std::mt19937_64 rng(500);
  for (int t = 0; t < 500; ++t) {
    const std::size_t classes = 1 + rng() % 5;
    const std::size_t d = 10 + rng() % 60;
    std::vector<int> labels(d);
    for (std::size_t i = 0; i < d; ++i) labels[i] = static_cast<int>(i < classes ? i : rng() % classes);
    std::shuffle(labels.begin(), labels.end(), rng);
    const std::size_t k = 2 + rng() % 9;
    const auto folds = stratified_kfold(labels, k, rng());
    std::map<std::pair<int, int>, int> count;
    for (std::size_t i = 0; i < d; ++i) {
      REQUIRE(folds[i] >= 0);
      REQUIRE(folds[i] < static_cast<int>(k));
      ++count[{labels[i], folds[i]}];
    }
    for (std::size_t c = 0; c < classes; ++c) {
      int lo = INT32_MAX, hi = 0;
      for (std::size_t f = 0; f < k; ++f) {
        const int v = count[{static_cast<int>(c), static_cast<int>(f)}];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi - lo <= 1);
    }
    // Fold sizes overall stay within one as well, thanks to the carried offset.
    int lo = INT32_MAX, hi = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const int v = static_cast<int>(std::count(folds.begin(), folds.end(), static_cast<int>(f)));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("synthetic generators are deterministic and labelled") {
  const std::size_t sizes[3] = {10, 12, 14};
  const auto a = make_synthetic(SyntheticKind::blobs, sizes, 0.2, 3);
  const auto b = make_synthetic(SyntheticKind::blobs, sizes, 0.2, 3);
  CHECK(a.features == b.features);
  CHECK(a.class_counts() == std::vector<std::size_t>{10, 12, 14});
  CHECK_NOTHROW(a.validate());
  CHECK(make_synthetic(SyntheticKind::blobs, sizes, 0.2, 4).features != a.features);
  CHECK_THROWS(make_synthetic(SyntheticKind::two_moons, sizes, 0.2, 3));
  const std::size_t tiny[2] = {3, 10};
  CHECK_THROWS(make_synthetic(SyntheticKind::blobs, tiny, 0.2, 3));
  for (auto kind : {SyntheticKind::two_moons, SyntheticKind::double_ring}) {
    const auto d = make_synthetic(kind, std::span(sizes, 2), 0.1, 1);
    CHECK(d.rows == 22);
    CHECK(d.cols == 2);
    CHECK_NOTHROW(d.validate());
  }
  CHECK(parse_synthetic_kind("moons") == SyntheticKind::two_moons);
  CHECK_THROWS(parse_synthetic_kind("spirals"));
}

TEST_CASE("subset renormalizes weights; harmonize aligns classes and width") {
  auto train = parse_libsvm("1 1:1\n2 2:1\n3 1:2\n");
  auto sub = subset(train, std::vector<std::size_t>{0, 2});
  CHECK(sub.rows == 2);
  CHECK(sub.weights == std::vector<double>{0.5, 0.5});
  CHECK(sub.label_table == train.label_table);

  auto test = parse_libsvm("3 3:1\n1 1:1\n");
  harmonize(train, test);
  CHECK(train.cols == 3);
  CHECK(test.cols == 3);
  CHECK(test.labels == std::vector<int>{2, 0});
  auto bad = parse_libsvm("9 1:1\n1 1:1\n");
  CHECK_THROWS(harmonize(train, bad));
}

TEST_CASE("min-max scaler maps the fitted data into [0, 1]") {
  const auto d = parse_libsvm("1 1:-2 2:5\n-1 1:4 2:5\n1 1:1 2:5\n");
  const auto s = MinMaxScaler::fit(d);
  auto copy = d;
  s.apply(copy);
  CHECK(copy.features[0] == 0.0);
  CHECK(copy.features[2] == 1.0);
  CHECK(copy.features[4] == 0.5);
  for (double v : copy.features) CHECK(std::isfinite(v));
}
