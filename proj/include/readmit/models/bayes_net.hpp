#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "readmit/models/scorer.hpp"

namespace readmit {

struct BayesNetParams {
  double smoothing = 1.0;
  /// Equal-frequency bins for numeric features.
  std::size_t numeric_bins = 5;
  /// Edges carrying no more conditional mutual information than this are left out,
  /// so conditionally independent features reduce to naive Bayes exactly.
  double min_edge_information = 1e-12;
};

/// Tree-augmented naive Bayes. Every feature depends on the class; on top of that
/// a maximum spanning tree over pairwise class-conditional mutual information
/// (Chow-Liu) links features into an acyclic, undirected structure, which is then
/// rooted at the lowest-index feature of each connected component.
class BayesNet final : public Scorer {
 public:
  static BayesNet train(const TrainingSet& train, const BayesNetParams& params = {});
  static BayesNet from_json(const SchemaShape& shape, const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::kBayesNet; }
  nlohmann::json parameters_json() const override;

  std::array<double, 2> posteriors(const EncounterVector& x) const;

  /// Parent feature of each feature in the tree, nullopt for roots.
  const std::vector<std::optional<std::size_t>>& parents() const { return parents_; }

  /// Discrete state of feature `f` for `x` (numeric features are binned).
  std::size_t state(const EncounterVector& x, std::size_t f) const;
  std::size_t arity(std::size_t f) const { return arity_[f]; }

 protected:
  double score_unchecked(const EncounterVector& x) const override;

 private:
  explicit BayesNet(SchemaShape shape) : Scorer(std::move(shape)) {}

  std::size_t cpt_index(std::size_t f, int c, std::size_t parent_state, std::size_t state) const;

  BayesNetParams params_;
  std::array<double, 2> log_prior_{};
  std::vector<std::size_t> arity_;
  std::vector<std::vector<double>> cutpoints_;  // numeric features only
  std::vector<std::optional<std::size_t>> parents_;
  /// log P(state | class, parent state), laid out [class][parent state][state].
  std::vector<std::vector<double>> log_cpt_;
};

/// I(A; B | C) in nats from empirical frequencies. States must be < their arity.
double conditional_mutual_information(std::span<const std::uint32_t> a, std::size_t arity_a,
                                      std::span<const std::uint32_t> b, std::size_t arity_b,
                                      std::span<const std::uint8_t> labels);

/// Cut points for `bins` equal-frequency bins; duplicates collapse. A value maps
/// to the number of cut points strictly below it.
std::vector<double> equal_frequency_cutpoints(std::vector<double> values, std::size_t bins);

/// Maximum spanning forest over edges heavier than `min_weight`. weights[i][j] is
/// symmetric. Returns each node's parent, with the lowest index of each component
/// as its root. Ties go to the lower (parent, child) pair.
std::vector<std::optional<std::size_t>> maximum_spanning_forest(
    const std::vector<std::vector<double>>& weights, double min_weight);

}  // namespace readmit
