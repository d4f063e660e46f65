#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "readmit/models/decision_tree.hpp"
#include "readmit/models/scorer.hpp"

namespace readmit {

struct BoostParams {
  std::size_t n_rounds = 100;
  std::size_t weak_tree_depth = 3;
  std::uint64_t seed = 1;
};

struct BoostRound {
  DecisionTree tree;
  double alpha = 0;
  double weighted_error = 0;
};

enum class BoostStop { kRoundLimit, kPerfectLearner, kWeakLearnerTooWeak };

std::string_view to_string(BoostStop stop);

/// Discrete AdaBoost over depth-limited trees. Each weak tree votes +1 when its
/// leaf is majority positive and -1 otherwise; the score is
/// 1 / (1 + exp(-2 * sum(alpha_t * h_t(x)))), the boosted posterior estimate.
class AdaBoost final : public Scorer {
 public:
  static AdaBoost train(const TrainingSet& train, const BoostParams& params = {});
  static AdaBoost from_json(const SchemaShape& shape, const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::kAdaBoost; }
  nlohmann::json parameters_json() const override;

  const std::vector<BoostRound>& rounds() const { return rounds_; }
  BoostStop stop_reason() const { return stop_; }
  double margin(const EncounterVector& x) const;

 protected:
  double score_unchecked(const EncounterVector& x) const override;

 private:
  explicit AdaBoost(SchemaShape shape) : Scorer(std::move(shape)) {}

  BoostParams params_;
  std::vector<BoostRound> rounds_;
  BoostStop stop_ = BoostStop::kRoundLimit;
};

}  // namespace readmit
