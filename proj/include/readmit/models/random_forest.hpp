#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "readmit/models/decision_tree.hpp"
#include "readmit/models/scorer.hpp"

namespace readmit {

enum class ForestVote {
  /// Mean of the trees' leaf positive fractions.
  kSoft,
  /// Fraction of trees whose leaf is majority positive.
  kHard,
};

struct ForestParams {
  std::size_t n_trees = 250;
  std::size_t max_depth = 5;
  /// 0 means ceil(sqrt(feature count)).
  std::size_t features_per_split = 0;
  std::uint64_t seed = 1;
  ForestVote vote = ForestVote::kSoft;
};

struct OobResult {
  double error = 0;
  /// Instances with at least one out-of-bag tree.
  std::size_t scored = 0;
  /// Instances drawn into every bootstrap sample.
  std::size_t skipped = 0;
};

/// Bagged Gini trees with random feature subsets. Tree t is grown from the
/// stream derive_seed(seed, t), so a forest of n trees is a prefix of any
/// larger forest with the same seed.
class RandomForest final : public Scorer {
 public:
  static RandomForest train(const TrainingSet& train, const ForestParams& params = {});
  static RandomForest from_json(const SchemaShape& shape, const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::kRandomForest; }
  nlohmann::json parameters_json() const override;

  const ForestParams& params() const { return params_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  /// Vote of one tree for x under the forest's voting rule.
  double tree_vote(std::size_t t, const EncounterVector& x) const;

  /// Bootstrap multiplicity of each training row per tree (saturating at 255).
  /// Empty for forests loaded from disk.
  const std::vector<std::vector<std::uint8_t>>& in_bag() const { return in_bag_; }

 protected:
  double score_unchecked(const EncounterVector& x) const override;

 private:
  explicit RandomForest(SchemaShape shape) : Scorer(std::move(shape)) {}

  ForestParams params_;
  std::vector<DecisionTree> trees_;
  std::vector<std::vector<std::uint8_t>> in_bag_;
};

/// Misclassification rate at threshold 0.5, each training row scored only by the
/// trees that did not sample it. `train` must be the set the forest was fit on.
/// Throws DataError when no row has an out-of-bag tree.
OobResult oob_error(const RandomForest& forest, const TrainingSet& train);

std::size_t default_features_per_split(std::size_t feature_count);

}  // namespace readmit
