#include "readmit/models/random_forest.hpp"

#include <algorithm>

#include "readmit/error.hpp"

namespace readmit {

std::size_t default_features_per_split(std::size_t feature_count) {
  std::size_t k = 1;
  while (k * k < feature_count) ++k;
  return k;
}

RandomForest RandomForest::train(const TrainingSet& train, const ForestParams& params) {
  if (params.n_trees < 1 || params.max_depth < 1) {
    throw UsageError("random forest: n_trees and max_depth must be >= 1");
  }
  if (train.size() < 2) throw DataError("random forest: need at least 2 training rows");
  require_both_classes(train, "random forest");

  RandomForest forest(SchemaShape::of(train.schema));
  forest.params_ = params;
  const auto binned = BinnedFeatures::build(train.schema, train.rows);
  const std::size_t n = train.size();

  TreeOptions options;
  options.max_depth = params.max_depth;
  options.features_per_split = params.features_per_split == 0
                                   ? default_features_per_split(train.schema.size())
                                   : params.features_per_split;

  std::vector<double> weights(n);
  forest.trees_.reserve(params.n_trees);
  forest.in_bag_.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::uint8_t> counts(n, 0);
    std::fill(weights.begin(), weights.end(), 0.0);
    for (std::size_t draw = 0; draw < n; ++draw) {
      const auto i = rng.below(n);
      weights[i] += 1;
      if (counts[i] < 255) ++counts[i];
    }
    forest.trees_.push_back(DecisionTree::grow(binned, train.labels, weights, options, rng));
    forest.in_bag_.push_back(std::move(counts));
  }
  return forest;
}

double RandomForest::tree_vote(std::size_t t, const EncounterVector& x) const {
  const double p = trees_[t].predict(x.features);
  if (params_.vote == ForestVote::kHard) return p > 0.5 ? 1.0 : 0.0;
  return p;
}

double RandomForest::score_unchecked(const EncounterVector& x) const {
  double sum = 0;
  for (std::size_t t = 0; t < trees_.size(); ++t) sum += tree_vote(t, x);
  return sum / static_cast<double>(trees_.size());
}

OobResult oob_error(const RandomForest& forest, const TrainingSet& train) {
  const auto& in_bag = forest.in_bag();
  if (in_bag.empty() || in_bag.front().size() != train.size()) {
    throw DataError("out-of-bag error: forest has no bootstrap record for this training set");
  }
  OobResult result;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    double sum = 0;
    std::size_t votes = 0;
    for (std::size_t t = 0; t < in_bag.size(); ++t) {
      if (in_bag[t][i] != 0) continue;
      sum += forest.tree_vote(t, train.rows[i]);
      ++votes;
    }
    if (votes == 0) {
      ++result.skipped;
      continue;
    }
    ++result.scored;
    const bool predicted = sum / static_cast<double>(votes) >= 0.5;
    if (predicted != (train.labels[i] != 0)) ++wrong;
  }
  if (result.scored == 0) {
    throw DataError("out-of-bag error: every row was drawn into every bootstrap sample (" +
                    std::to_string(train.size()) + " rows, " + std::to_string(in_bag.size()) + " trees)");
  }
  result.error = static_cast<double>(wrong) / static_cast<double>(result.scored);
  return result;
}

nlohmann::json RandomForest::parameters_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"n_trees", params_.n_trees},
          {"max_depth", params_.max_depth},
          {"features_per_split", params_.features_per_split},
          {"seed", params_.seed},
          {"vote", params_.vote == ForestVote::kSoft ? "soft" : "hard"},
          {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const SchemaShape& shape, const nlohmann::json& j) {
  RandomForest forest(shape);
  forest.params_.n_trees = j.at("n_trees").get<std::size_t>();
  forest.params_.max_depth = j.at("max_depth").get<std::size_t>();
  forest.params_.features_per_split = j.at("features_per_split").get<std::size_t>();
  forest.params_.seed = j.at("seed").get<std::uint64_t>();
  const auto vote = j.at("vote").get<std::string>();
  if (vote != "soft" && vote != "hard") throw DataError("random forest model: unknown vote rule " + vote);
  forest.params_.vote = vote == "soft" ? ForestVote::kSoft : ForestVote::kHard;
  for (const auto& t : j.at("trees")) forest.trees_.push_back(DecisionTree::from_json(t));
  if (forest.trees_.size() != forest.params_.n_trees) throw DataError("random forest model: tree count mismatch");
  return forest;
}

}  // namespace readmit
