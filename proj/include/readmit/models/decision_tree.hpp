#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "readmit/dataset.hpp"
#include "readmit/rng.hpp"

namespace readmit {

/// Column-major discretization of a training set for split search. Nominal
/// features keep their codes; numeric features map to the rank of their value
/// among the distinct training values.
struct BinnedFeatures {
  std::vector<FeatureKind> kinds;
  std::vector<std::size_t> bin_counts;
  std::vector<std::vector<std::uint32_t>> bins;     // [feature][row]
  std::vector<std::vector<double>> distinct_values;  // numeric features, ascending
  std::size_t rows = 0;

  static BinnedFeatures build(const FeatureSchema& schema, std::span<const EncounterVector> rows);
  std::size_t feature_count() const { return kinds.size(); }
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  /// Numeric split: x <= threshold goes left.
  double threshold = 0;
  /// Nominal split: code c goes left iff c < size() and left_codes[c] != 0.
  std::vector<std::uint8_t> left_codes;
  std::int32_t left = -1;
  std::int32_t right = -1;
  /// Weighted share of positives among the training rows reaching the node.
  double positive_fraction = 0;
  double weight = 0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeOptions {
  std::size_t max_depth = 5;
  /// Features examined per split, drawn without replacement; 0 examines all.
  std::size_t features_per_split = 0;
  /// Nodes holding fewer distinct rows than this are not split.
  std::size_t min_rows_to_split = 2;
};

/// Binary tree grown greedily on weighted Gini impurity. Numeric features split on
/// a threshold; nominal features split into two category sets, found by ordering
/// categories by positive share. Ties go to the lowest feature index, then the
/// lowest threshold or smallest category prefix.
class DecisionTree {
 public:
  /// `weights[i] == 0` excludes row i (used for bootstrap samples).
  static DecisionTree grow(const BinnedFeatures& data, std::span<const std::uint8_t> labels,
                           std::span<const double> weights, const TreeOptions& options, Rng& rng);

  /// Leaf positive fraction reached by x.
  double predict(std::span<const double> x) const { return nodes_[leaf_of(x)].positive_fraction; }
  std::size_t leaf_of(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace readmit
