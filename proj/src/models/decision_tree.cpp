#include "readmit/models/decision_tree.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "readmit/error.hpp"

namespace readmit {

BinnedFeatures BinnedFeatures::build(const FeatureSchema& schema, std::span<const EncounterVector> rows) {
  BinnedFeatures out;
  const std::size_t n_features = schema.size();
  out.rows = rows.size();
  out.kinds.resize(n_features);
  out.bin_counts.resize(n_features);
  out.bins.assign(n_features, std::vector<std::uint32_t>(rows.size()));
  out.distinct_values.resize(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    out.kinds[f] = schema[f].kind;
    if (schema[f].kind == FeatureKind::kNominal) {
      out.bin_counts[f] = schema.cardinality(f);
      for (std::size_t i = 0; i < rows.size(); ++i) out.bins[f][i] = static_cast<std::uint32_t>(rows[i].features[f]);
    } else {
      auto& values = out.distinct_values[f];
      values.reserve(rows.size());
      for (const auto& r : rows) values.push_back(r.features[f]);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      out.bin_counts[f] = values.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out.bins[f][i] = static_cast<std::uint32_t>(
            std::lower_bound(values.begin(), values.end(), rows[i].features[f]) - values.begin());
      }
    }
  }
  return out;
}

namespace {

struct Split {
  std::size_t feature = 0;
  double impurity = 0;  // weighted children impurity, lower is better
  // Numeric: rows with bin <= last_left_bin go left.
  std::uint32_t last_left_bin = 0;
  double threshold = 0;
  std::vector<std::uint8_t> left_codes;
};

/// Weight times Gini impurity of a two-class node: 2 * pos * neg / (pos + neg).
double weighted_gini(double pos, double neg) {
  const double w = pos + neg;
  return w > 0 ? 2.0 * pos * neg / w : 0.0;
}

class Grower {
 public:
  Grower(const BinnedFeatures& data, std::span<const std::uint8_t> labels, std::span<const double> weights,
         const TreeOptions& options, Rng& rng)
      : data_(data), labels_(labels), weights_(weights), options_(options), rng_(rng) {
    std::size_t max_bins = 1;
    for (const auto b : data.bin_counts) max_bins = std::max(max_bins, b);
    pos_.resize(max_bins);
    neg_.resize(max_bins);
  }

  std::vector<TreeNode> run() {
    std::vector<std::uint32_t> index;
    for (std::size_t i = 0; i < data_.rows; ++i) {
      if (weights_[i] > 0) index.push_back(static_cast<std::uint32_t>(i));
    }
    if (index.empty()) throw DataError("decision tree: no rows with positive weight");
    grow(index, 0, index.size(), 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow(std::vector<std::uint32_t>& index, std::size_t begin, std::size_t end, std::size_t depth) {
    double w_pos = 0;
    double w_neg = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const auto i = index[k];
      (labels_[i] ? w_pos : w_neg) += weights_[i];
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].weight = w_pos + w_neg;
    nodes_[id].positive_fraction = w_pos / (w_pos + w_neg);

    if (depth >= options_.max_depth || w_pos == 0 || w_neg == 0 || end - begin < options_.min_rows_to_split) {
      return id;
    }
    const auto split = best_split(index, begin, end, w_pos, w_neg);
    if (!split) return id;

    const auto mid = static_cast<std::size_t>(
        std::stable_partition(index.begin() + static_cast<std::ptrdiff_t>(begin),
                              index.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](std::uint32_t i) { return goes_left(*split, data_.bins[split->feature][i]); }) -
        index.begin());

    nodes_[id].feature = static_cast<std::int32_t>(split->feature);
    nodes_[id].threshold = split->threshold;
    nodes_[id].left_codes = split->left_codes;
    const auto left = grow(index, begin, mid, depth + 1);
    const auto right = grow(index, mid, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  bool goes_left(const Split& s, std::uint32_t bin) const {
    if (data_.kinds[s.feature] == FeatureKind::kNumeric) return bin <= s.last_left_bin;
    return bin < s.left_codes.size() && s.left_codes[bin] != 0;
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t n = data_.feature_count();
    std::vector<std::size_t> features(n);
    std::iota(features.begin(), features.end(), 0);
    const std::size_t k = options_.features_per_split;
    if (k == 0 || k >= n) return features;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng_.below(n - i);
      std::swap(features[i], features[j]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
    return features;
  }

  std::optional<Split> best_split(const std::vector<std::uint32_t>& index, std::size_t begin, std::size_t end,
                                  double w_pos, double w_neg) {
    const double total = w_pos + w_neg;
    const double tolerance = 1e-12 * total;
    std::optional<Split> best;
    double best_impurity = weighted_gini(w_pos, w_neg) - tolerance;

    for (const auto f : candidate_features()) {
      const std::size_t n_bins = data_.bin_counts[f];
      std::fill_n(pos_.begin(), n_bins, 0.0);
      std::fill_n(neg_.begin(), n_bins, 0.0);
      const auto& column = data_.bins[f];
      for (std::size_t k = begin; k < end; ++k) {
        const auto i = index[k];
        (labels_[i] ? pos_ : neg_)[column[i]] += weights_[i];
      }

      if (data_.kinds[f] == FeatureKind::kNumeric) {
        double left_pos = 0;
        double left_neg = 0;
        std::optional<std::uint32_t> last_nonempty;
        for (std::uint32_t b = 0; b < n_bins; ++b) {
          if (pos_[b] + neg_[b] == 0) continue;
          if (last_nonempty) {
            const double impurity =
                weighted_gini(left_pos, left_neg) + weighted_gini(w_pos - left_pos, w_neg - left_neg);
            if (impurity < best_impurity) {
              best_impurity = impurity - tolerance;
              const auto& values = data_.distinct_values[f];
              best = Split{f, impurity, *last_nonempty, 0.5 * (values[*last_nonempty] + values[b]), {}};
            }
          }
          left_pos += pos_[b];
          left_neg += neg_[b];
          last_nonempty = b;
        }
      } else {
        std::vector<std::uint32_t> present;
        for (std::uint32_t b = 0; b < n_bins; ++b) {
          if (pos_[b] + neg_[b] > 0) present.push_back(b);
        }
        std::stable_sort(present.begin(), present.end(), [&](std::uint32_t a, std::uint32_t b) {
          // pos_a / w_a < pos_b / w_b, without dividing
          return pos_[a] * (pos_[b] + neg_[b]) < pos_[b] * (pos_[a] + neg_[a]);
        });
        double left_pos = 0;
        double left_neg = 0;
        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
          left_pos += pos_[present[k]];
          left_neg += neg_[present[k]];
          const double impurity =
              weighted_gini(left_pos, left_neg) + weighted_gini(w_pos - left_pos, w_neg - left_neg);
          if (impurity < best_impurity) {
            best_impurity = impurity - tolerance;
            Split s{f, impurity, 0, 0, std::vector<std::uint8_t>(n_bins, 0)};
            for (std::size_t m = 0; m <= k; ++m) s.left_codes[present[m]] = 1;
            best = std::move(s);
          }
        }
      }
    }
    return best;
  }

  const BinnedFeatures& data_;
  std::span<const std::uint8_t> labels_;
  std::span<const double> weights_;
  const TreeOptions& options_;
  Rng& rng_;
  std::vector<double> pos_;
  std::vector<double> neg_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree DecisionTree::grow(const BinnedFeatures& data, std::span<const std::uint8_t> labels,
                                std::span<const double> weights, const TreeOptions& options, Rng& rng) {
  if (labels.size() != data.rows || weights.size() != data.rows) {
    throw DataError("decision tree: labels/weights do not match the row count");
  }
  DecisionTree tree;
  tree.nodes_ = Grower(data, labels, weights, options, rng).run();
  return tree;
}

std::size_t DecisionTree::leaf_of(std::span<const double> x) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    const double v = x[static_cast<std::size_t>(node.feature)];
    bool left;
    if (node.left_codes.empty()) {
      left = v <= node.threshold;
    } else {
      const auto code = static_cast<std::size_t>(v);
      left = code < node.left_codes.size() && node.left_codes[code] != 0;
    }
    id = static_cast<std::size_t>(left ? node.left : node.right);
  }
  return id;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t max_depth = 0;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    max_depth = std::max(max_depth, depth[id]);
    if (!nodes_[id].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[id].left)] = depth[id] + 1;
      depth[static_cast<std::size_t>(nodes_[id].right)] = depth[id] + 1;
    }
  }
  return max_depth;
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json j{{"p", n.positive_fraction}, {"w", n.weight}};
    if (!n.is_leaf()) {
      j["f"] = n.feature;
      j["l"] = n.left;
      j["r"] = n.right;
      if (n.left_codes.empty()) {
        j["t"] = n.threshold;
      } else {
        j["s"] = n.left_codes;
      }
    }
    nodes.push_back(std::move(j));
  }
  return nodes;
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  DecisionTree tree;
  for (const auto& n : j) {
    TreeNode node;
    node.positive_fraction = n.at("p").get<double>();
    node.weight = n.at("w").get<double>();
    if (n.contains("f")) {
      node.feature = n.at("f").get<std::int32_t>();
      node.left = n.at("l").get<std::int32_t>();
      node.right = n.at("r").get<std::int32_t>();
      if (n.contains("s")) {
        node.left_codes = n.at("s").get<std::vector<std::uint8_t>>();
      } else {
        node.threshold = n.at("t").get<double>();
      }
    }
    tree.nodes_.push_back(std::move(node));
  }
  const auto count = static_cast<std::int32_t>(tree.nodes_.size());
  for (const auto& n : tree.nodes_) {
    if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
      throw DataError("decision tree: child index out of range");
    }
  }
  if (tree.nodes_.empty()) throw DataError("decision tree: no nodes");
  return tree;
}

}  // namespace readmit
