#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orthomads/svm.hpp"

using namespace orthomads;

namespace {

struct Binary {
  std::vector<double> x;
  std::vector<int> y;
  std::size_t rows = 0, cols = 0;
};

Binary random_binary(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g;
  Binary b;
  b.rows = rows;
  b.cols = cols;
  b.x.resize(rows * cols);
  for (double& v : b.x) v = g(rng);
  b.y.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) b.y[i] = i % 2 == 0 ? 1 : -1;
  std::shuffle(b.y.begin(), b.y.end(), rng);
  return b;
}

void check_feasible(const SvmModel& m, const std::vector<int>& y, double C) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(std::max(-m.alphas[i], m.alphas[i] - C) <= 1e-9);
    s += m.alphas[i] * y[i];
  }
  CHECK(std::abs(s) <= 1e-9);
}

Dataset blobs(std::uint64_t seed, double noise = 0.1) {
  const std::size_t sizes[2] = {40, 40};
  return make_synthetic(SyntheticKind::blobs, sizes, noise, seed);
}

}  // namespace

TEST_CASE("rbf values") {
  const Point a{0, 0}, b{1, 0};
  CHECK(rbf(a, a, 3.0) == 1.0);
  CHECK(rbf(a, b, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  double prev = 1.0;
  for (double g = 0.1; g < 50; g *= 1.7) {
    const double v = rbf(a, b, g);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("symmetric pair: equal alphas, zero intercept, zero score at midpoint") {
  const std::vector<double> x{1.0, 0.0, -1.0, 0.0};
  const std::vector<int> y{1, -1};
  const auto m = smo_train(x.data(), 2, 2, y, 1000.0, 0.5);
  CHECK(m.alphas[0] == doctest::Approx(m.alphas[1]));
  CHECK(m.alphas[0] > 0.0);
  CHECK(std::abs(m.intercept) < 1e-9);
  CHECK(std::abs(score(m, Point{0.0, 0.0})) < 1e-9);
}

TEST_CASE("XOR: four support vectors, perfect training accuracy, margin at free SVs") {
  const std::vector<double> x{1, 1, -1, -1, 1, -1, -1, 1};
  const std::vector<int> y{1, 1, -1, -1};
  const auto m = smo_train(x.data(), 4, 2, y, 10.0, 1.0);
  CHECK(m.support_count() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double s = score(m, std::span<const double>(x.data() + 2 * i, 2));
    CHECK(s * y[i] > 0.0);
    if (m.alphas[i] > 1e-8 && m.alphas[i] < 10.0 - 1e-8) CHECK(std::abs(std::abs(s) - 1.0) < 1e-3);
  }
  const auto q = oracle::signed_gram(x, 4, 2, y, 1.0);
  const double grid = oracle::dual_fine_grid(q, y, 10.0, 21, 40);
  const double exact = oracle::dual_active_set(q, y, 10.0).value;
  CHECK(exact >= grid - 1e-9);
  CHECK(m.dual_objective == doctest::Approx(exact).epsilon(1e-3));
  CHECK(m.dual_objective == doctest::Approx(grid).epsilon(1e-3));
}

TEST_CASE("small C drives alphas to zero") {
  std::mt19937_64 rng(4);
  const auto b = random_binary(rng, 10, 2);
  const auto m = smo_train(b.x.data(), b.rows, b.cols, b.y, 1e-8, 1.0);
  for (double a : m.alphas) CHECK(a <= 1e-8);
}

TEST_CASE("empty support set scores the intercept") {
  SvmModel m;
  m.cols = 2;
  m.intercept = 0.25;
  CHECK(score(m, Point{3.0, 4.0}) == 0.25);
}

TEST_CASE("dual optimum matches the active-set oracle on tiny problems") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int t = 0; t < 60; ++t) {
    const std::size_t rows = 2 + rng() % 5;
    const auto b = random_binary(rng, rows, 1 + rng() % 3);
    const double C = std::pow(10.0, logu(rng)), gamma = std::pow(10.0, logu(rng));
    const auto m = smo_train(b.x.data(), b.rows, b.cols, b.y, C, gamma);
    check_feasible(m, b.y, C);
    const auto q = oracle::signed_gram(b.x, b.rows, b.cols, b.y, gamma);
    const double ref = oracle::dual_active_set(q, b.y, C).value;
    CHECK(std::abs(m.dual_objective - ref) <= 1e-3 * std::max(1.0, std::abs(ref)));
    CHECK(m.dual_objective == doctest::Approx(oracle::dual_value(q, m.alphas)).epsilon(1e-9));
    CHECK_FALSE(m.stalled);
  }
}

TEST_CASE("feasibility holds across the tuning box") {
  std::mt19937_64 rng(2);
  const auto b = random_binary(rng, 60, 2);
  for (double C : {0.01, 1.0, 30.0, 100.01}) {
    for (double g : {0.01, 0.5, 10.0, 100.01}) {
      SmoOptions o;
      o.cache_megabytes = 0;  // exercise the minimal row cache
      const auto m = smo_train(b.x.data(), b.rows, b.cols, b.y, C, g, o);
      check_feasible(m, b.y, C);
    }
  }
}

TEST_CASE("iteration cap flags a stall") {
  std::mt19937_64 rng(3);
  const auto b = random_binary(rng, 80, 2);
  SmoOptions o;
  o.max_iterations = 3;
  const auto m = smo_train(b.x.data(), b.rows, b.cols, b.y, 100.0, 1.0, o);
  CHECK(m.stalled);
  check_feasible(m, b.y, 100.0);
}

TEST_CASE("hinge loss examples and oracle") {
  CHECK(hinge_loss(std::vector<double>{1.0, 2.0}, std::vector<double>{0.5, 0.5}) == 0.0);
  CHECK(hinge_loss(std::vector<double>{0.0, 2.0}, std::vector<double>{0.5, 0.5}) == 0.5);
  CHECK(hinge_loss(std::vector<double>{-1.0}, std::vector<double>{1.0}) == 2.0);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.5, 2.0);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<double> m(n), w(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = g(rng);
      w[i] = u(rng);
      s += w[i];
    }
    for (double& v : w) v /= s;
    CHECK(std::abs(hinge_loss(m, w) - oracle::hinge(m, w)) <= 1e-12);
  }
}

TEST_CASE("vote: unanimous, K = 2 sign, circular tie") {
  const std::vector<std::pair<int, int>> p3{{0, 1}, {0, 2}, {1, 2}};
  CHECK(ovo_vote(3, p3, std::vector<double>{1.0, 1.0, 1.0}) == 0);

  const std::vector<std::pair<int, int>> p2{{0, 1}};
  for (double s : {-2.0, -1e-9, 0.0, 1e-9, 3.0}) {
    CHECK(ovo_vote(2, p2, std::vector<double>{s}) == (s >= 0.0 ? 0 : 1));
  }

  // 0 beats 1, 1 beats 2, 2 beats 0: one vote each. Enumerate margin sums.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 200; ++t) {
    const double s01 = u(rng), s02 = -u(rng), s12 = u(rng);
    const std::vector<double> scores{s01, s02, s12};
    const double sum[3] = {std::abs(s01), std::abs(s12), std::abs(s02)};
    int expect = 0;
    for (int c = 1; c < 3; ++c) {
      if (sum[c] > sum[expect]) expect = c;
    }
    CHECK(ovo_vote(3, p3, scores) == expect);
  }
  // Equal margin sums fall back to the smaller id.
  CHECK(ovo_vote(3, p3, std::vector<double>{1.0, -1.0, 1.0}) == 0);
}

TEST_CASE("ensemble has K(K-1)/2 machines and K = 2 prediction follows the score sign") {
  const std::size_t sizes[3] = {20, 20, 20};
  const auto d3 = make_synthetic(SyntheticKind::blobs, sizes, 0.2, 1);
  CHECK(train_ovo(d3, 10.0, 1.0).machines.size() == 3);

  const auto d2 = make_synthetic(SyntheticKind::two_moons, std::span(sizes, 2), 0.2, 1);
  const auto ens = train_ovo(d2, 10.0, 1.0);
  REQUIRE(ens.machines.size() == 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int t = 0; t < 300; ++t) {
    const Point h{u(rng), u(rng)};
    const int expect = score(ens.machines[0].model, h) >= 0.0 ? ens.machines[0].class_a : ens.machines[0].class_b;
    CHECK(predict_multiclass(ens, h) == expect);
  }
}

TEST_CASE("separable blobs: zero loss and perfect accuracy at a sane point") {
  ObjectiveSpec spec;
  spec.train = blobs(7);
  const auto f = make_svm_objective(spec);
  const double good = f(Point{10.0, 1.0});
  CHECK(good < 0.01);
  CHECK(test_accuracy(spec, blobs(8), 10.0, 1.0) == 1.0);
  CHECK(f(Point{0.0101, 1.0}) > good);
}

TEST_CASE("objective is deterministic and thread-count independent") {
  const std::size_t sizes[2] = {30, 30};
  ObjectiveSpec spec;
  spec.train = make_synthetic(SyntheticKind::two_moons, sizes, 0.3, 5);
  const auto f1 = make_svm_objective(spec);
  spec.threads = 3;
  const auto f3 = make_svm_objective(spec);
  for (double C : {0.5, 20.0}) {
    for (double g : {0.1, 5.0}) {
      const double a = f1(Point{C, g});
      CHECK(a == f1(Point{C, g}));
      CHECK(a == f3(Point{C, g}));
    }
  }
}

TEST_CASE("holdout protocol and degenerate folds") {
  const std::size_t sizes[2] = {30, 30};
  ObjectiveSpec spec;
  spec.protocol = Protocol::holdout;
  spec.train = make_synthetic(SyntheticKind::double_ring, sizes, 0.1, 2);
  spec.validation = make_synthetic(SyntheticKind::double_ring, sizes, 0.1, 3);
  const double v = make_svm_objective(spec)(Point{10.0, 1.0});
  CHECK(std::isfinite(v));
  CHECK(v >= 0.0);

  ObjectiveSpec missing;
  missing.protocol = Protocol::holdout;
  missing.train = spec.train;
  CHECK_THROWS(make_svm_objective(missing));

  // A single instance of one class: the fold holding it trains without that
  // class and is skipped with a warning.
  std::string text = "1 1:5 2:5\n";
  for (int i = 0; i < 30; ++i) text += "-1 1:" + std::to_string(i % 7) + " 2:" + std::to_string(i % 5) + "\n";
  ObjectiveSpec cv;
  cv.train = parse_libsvm(text);
  SvmObjective obj(cv);
  CHECK(obj.usable_folds() == 2);
  CHECK_FALSE(obj.warnings().empty());
  CHECK(std::isfinite(obj(Point{1.0, 1.0})));
}

TEST_CASE("multiclass loss is the covered-weight average of machine hinge losses") {
  const std::size_t sizes[3] = {15, 15, 15};
  const auto train = make_synthetic(SyntheticKind::blobs, sizes, 0.4, 1);
  const auto val = make_synthetic(SyntheticKind::blobs, sizes, 0.4, 2);
  const auto ens = train_ovo(train, 5.0, 0.5);
  double num = 0.0, den = 0.0;
  for (const auto& mc : ens.machines) {
    for (std::size_t i = 0; i < val.rows; ++i) {
      const int c = val.labels[i];
      if (c != mc.class_a && c != mc.class_b) continue;
      const double y = c == mc.class_a ? 1.0 : -1.0;
      const double m = y * score(mc.model, val.row_span(i));
      num += val.weights[i] * std::max(0.0, 1.0 - m);
      den += val.weights[i];
    }
  }
  CHECK(ovo_hinge_loss(ens, val) == doctest::Approx(num / den).epsilon(1e-12));
}
