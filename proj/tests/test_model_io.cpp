#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "readmit/error.hpp"
#include "readmit/eval.hpp"
#include "readmit/models/model_io.hpp"
#include "readmit/models/training.hpp"
#include "readmit/rng.hpp"

using namespace readmit;
using testing::make_toy;
using testing::nominal;
using testing::numeric;

namespace {

testing::Toy mixed(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = double(rng.below(3));
    const double v = double(rng.below(12));
    xs.push_back({k, v});
    ys.push_back(rng.uniform() < (k == 2 ? 0.6 : 0.2) + 0.02 * v);
  }
  return make_toy({nominal("k", {"a", "b", "c"}), numeric("v")}, xs, ys);
}

ModelConfig small_config(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.forest.n_trees = 5;
  c.boost.n_rounds = 5;
  c.mlp.bfgs_max_iters = 30;
  return c;
}

SplitPlan split_for(const testing::Toy& t, std::uint64_t seed) {
  std::vector<std::int64_t> ids;
  for (const auto& r : t.rows) ids.push_back(r.encounter_id);
  return make_split(ids, seed);
}

}  // namespace

TEST_CASE("every model kind survives a save and load") {
  const auto t = mixed(200, 1);
  const auto dir = std::filesystem::temp_directory_path() / "readmit_model_io";
  std::filesystem::create_directories(dir);
  for (const auto kind : kAllModelKinds) {
    CAPTURE(to_string(kind));
    const auto model = train_model(small_config(kind), t.view());
    CHECK(model->kind() == kind);
    const auto path = dir / (std::string(to_string(kind)) + ".json");
    save_model(*model, path);
    const auto back = load_model(path);
    CHECK(back->kind() == kind);
    CHECK(back->schema_shape() == model->schema_shape());
    for (const auto& x : t.rows) CHECK(back->score(x) == model->score(x));
    CHECK(model_to_json(*back) == model_to_json(*model));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed model files are data errors") {
  const auto t = mixed(100, 2);
  const auto model = train_model(small_config(ModelKind::kNaiveBayes), t.view());
  auto j = model_to_json(*model);
  CHECK(j.at("version") == kModelFormatVersion);

  auto wrong_version = j;
  wrong_version["version"] = kModelFormatVersion + 1;
  CHECK_THROWS_WITH_AS(model_from_json(wrong_version), doctest::Contains("version"), DataError);

  auto wrong_kind = j;
  wrong_kind["kind"] = "svm";
  CHECK_THROWS_AS(model_from_json(wrong_kind), DataError);

  auto missing = j;
  missing["parameters"].erase("log_prior");
  CHECK_THROWS_AS(model_from_json(missing), DataError);

  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), DataError);
}

TEST_CASE("scoring data from another schema is rejected") {
  const auto t = mixed(100, 3);
  const auto model = train_model(small_config(ModelKind::kRandomForest), t.view());
  EncounterVector short_row;
  short_row.features = {0};
  CHECK_THROWS_AS(model->score(short_row), DataError);

  const auto other = make_toy({nominal("k", {"a", "b"}), numeric("v")}, {{0, 1}}, {1});
  CHECK_THROWS_AS(score_all(*model, other.dataset()), DataError);
  CHECK(score_all(*model, t.dataset()).size() == 100);
}

TEST_CASE("cross-validation scores each fold on the complement's model") {
  const auto t = mixed(400, 4);
  const auto split = split_for(t, 9);
  const auto data = t.dataset();
  const std::vector<ModelConfig> one{small_config(ModelKind::kNaiveBayes)};
  const auto cv = cross_validate(one, data, split, Task::kShortTerm);
  REQUIRE(cv.candidates.size() == 1);
  CHECK(cv.selected == 0);
  double sum = 0;
  for (std::size_t k = 0; k < kFoldCount; ++k) {
    std::vector<EncounterVector> train_rows, held_rows;
    for (const auto i : split.fold_complement(k)) train_rows.push_back(t.rows[i]);
    for (const auto i : split.folds[k]) held_rows.push_back(t.rows[i]);
    const auto train_labels = task_labels(train_rows, Task::kShortTerm);
    const auto held_labels = task_labels(held_rows, Task::kShortTerm);
    const auto model = train_model(one[0], {*t.schema, train_rows, train_labels});
    const auto scores = score_rows(*model, held_rows);
    const double ap = average_precision(pair_scores(scores, held_labels));
    CHECK(cv.candidates[0].fold_auprc[k] == ap);
    sum += ap;
  }
  CHECK(cv.candidates[0].mean_auprc == doctest::Approx(sum / kFoldCount));
}

TEST_CASE("cross-validation prefers the better and then the smaller model") {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 200; ++i) {
    xs.push_back({double(i % 3), double(i % 20)});
    ys.push_back(i % 20 >= 6 && i % 20 <= 13);
  }
  const auto t = make_toy({nominal("k", {"a", "b", "c"}), numeric("v")}, xs, ys);
  const auto split = split_for(t, 5);

  // Both boosters separate the data in their first round, so they tie.
  auto big = small_config(ModelKind::kAdaBoost);
  big.boost.n_rounds = 50;
  auto small = small_config(ModelKind::kAdaBoost);
  small.boost.n_rounds = 10;
  const std::vector<ModelConfig> tie{big, small};
  const auto cv = cross_validate(tie, t.dataset(), split, Task::kShortTerm);
  CHECK(cv.candidates[0].mean_auprc == 1.0);
  CHECK(cv.candidates[1].mean_auprc == 1.0);
  CHECK(cv.selected == 1);

  // A single stump cannot isolate the middle interval.
  auto weak = small_config(ModelKind::kRandomForest);
  weak.forest.n_trees = 1;
  weak.forest.max_depth = 1;
  const std::vector<ModelConfig> mixed_candidates{weak, big};
  const auto cv2 = cross_validate(mixed_candidates, t.dataset(), split, Task::kShortTerm);
  CHECK(cv2.candidates[0].mean_auprc < 1.0);
  CHECK(cv2.selected == 1);
}

TEST_CASE("cross-validation needs both classes in every held-out fold") {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 100; ++i) {
    xs.push_back({double(i % 3), double(i % 7)});
    ys.push_back(i == 10 || i == 50);
  }
  const auto t = make_toy({nominal("k", {"a", "b", "c"}), numeric("v")}, xs, ys);
  const std::vector<ModelConfig> one{small_config(ModelKind::kNaiveBayes)};
  CHECK_THROWS_AS(cross_validate(one, t.dataset(), split_for(t, 1), Task::kShortTerm), DataError);
  CHECK_THROWS_AS(cross_validate({}, t.dataset(), split_for(t, 1), Task::kShortTerm), UsageError);
}

TEST_CASE("model size and seeding") {
  auto c = small_config(ModelKind::kRandomForest);
  CHECK(c.size() == 5);
  c.kind = ModelKind::kNaiveBayes;
  CHECK(c.size() == 0);
  const auto seeded = c.with_seed(77);
  CHECK(seeded.forest.seed == 77);
  CHECK(seeded.boost.seed == 77);
  CHECK(seeded.mlp.seed == 77);
}
