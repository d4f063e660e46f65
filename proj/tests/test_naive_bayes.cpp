#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "readmit/error.hpp"
#include "readmit/models/naive_bayes.hpp"
#include "readmit/rng.hpp"

using namespace readmit;
using testing::make_toy;
using testing::nominal;
using testing::numeric;

namespace {

EncounterVector point(std::vector<double> f) {
  EncounterVector x;
  x.features = std::move(f);
  return x;
}

}  // namespace

TEST_CASE("single nominal feature with equal priors returns the likelihood ratio") {
  // P(v | pos) = 0.8, P(v | neg) = 0.2, five of each class.
  const auto t = make_toy({nominal("f", {"v", "w"})}, {{0}, {0}, {0}, {0}, {1}, {0}, {1}, {1}, {1}, {1}},
                          {1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
  const auto nb = NaiveBayes::train(t.view(), {.smoothing = 0.0});
  CHECK(nb.score(point({0})) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(nb.score(point({1})) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("uninformative features leave the prior") {
  std::vector<std::vector<double>> xs(10, {1.0, 3.0});
  const auto t = make_toy({nominal("a", {"x", "y"}), numeric("n")}, xs, {1, 1, 1, 0, 0, 0, 0, 0, 0, 0});
  const auto nb = NaiveBayes::train(t.view(), {.smoothing = 0.0});
  CHECK(nb.score(point({1, 3})) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("eight-row fixture matches hand-computed posteriors") {
  // A in {a, b}, B in {x, y}; vocabularies carry the other bucket, so smoothing
  // 1 gives denominators class_count + 3.
  //   P(a|+) = 4/7, P(b|+) = 2/7, P(a|-) = 2/7, P(b|-) = 4/7
  //   P(x|+) = 4/7, P(y|+) = 2/7, P(x|-) = 2/7, P(y|-) = 4/7
  const auto t = make_toy({nominal("A", {"a", "b"}), nominal("B", {"x", "y"})},
                          {{0, 0}, {0, 1}, {0, 0}, {1, 0}, {1, 1}, {1, 1}, {0, 1}, {1, 0}}, {1, 1, 1, 1, 0, 0, 0, 0});
  const auto nb = NaiveBayes::train(t.view());
  CHECK(nb.score(point({0, 0})) == doctest::Approx(16.0 / 20.0).epsilon(1e-12));
  CHECK(nb.score(point({1, 1})) == doctest::Approx(4.0 / 20.0).epsilon(1e-12));
  CHECK(nb.score(point({0, 1})) == doctest::Approx(0.5).epsilon(1e-12));
  // The other bucket was never seen: P(other|c) = 1/7 for both classes.
  CHECK(nb.score(point({2, 0})) == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("Gaussian likelihood for numeric features") {
  const auto t = make_toy({numeric("n")}, {{1}, {3}, {5}, {2}, {4}, {0}}, {1, 1, 1, 0, 0, 0});
  const auto nb = NaiveBayes::train(t.view());
  auto density = [](double x, double mean, double var) {
    return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
  };
  // Positive: mean 3, population variance 8/3. Negative: mean 2, variance 8/3.
  const double x = 2.5;
  const double p = density(x, 3, 8.0 / 3.0);
  const double n = density(x, 2, 8.0 / 3.0);
  CHECK(nb.score(point({x})) == doctest::Approx(p / (p + n)).epsilon(1e-12));
}

TEST_CASE("zero variance is floored, not an error") {
  const auto t = make_toy({numeric("n")}, {{2}, {2}, {2}, {1}, {3}, {5}}, {1, 1, 1, 0, 0, 0});
  const auto nb = NaiveBayes::train(t.view());
  const double s = nb.score(point({2}));
  CHECK(std::isfinite(s));
  CHECK(s > 0.99);
}

TEST_CASE("posteriors sum to one") {
  Rng rng(3);
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 200; ++i) {
    xs.push_back({static_cast<double>(rng.below(3)), static_cast<double>(rng.below(40)), static_cast<double>(rng.below(2))});
    ys.push_back(rng.uniform() < 0.3);
  }
  const auto t = make_toy({nominal("a", {"p", "q", "r"}), numeric("n"), nominal("b", {"s", "t"})}, xs, ys);
  const auto nb = NaiveBayes::train(t.view());
  for (const auto& x : t.rows) {
    const auto p = nb.posteriors(x);
    CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-9);
    const double s = nb.score(x);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("training needs both classes; scoring checks the schema") {
  const auto t = make_toy({nominal("a", {"p"})}, {{0}, {0}}, {1, 1});
  CHECK_THROWS_AS(NaiveBayes::train(t.view()), DataError);
  const auto u = make_toy({nominal("a", {"p"})}, {{0}, {0}}, {1, 0});
  const auto nb = NaiveBayes::train(u.view());
  CHECK_THROWS_AS(nb.score(point({0, 1})), DataError);
  CHECK_THROWS_AS(nb.score(point({5})), DataError);
  CHECK_THROWS_AS(nb.score(point({0.5})), DataError);
}
