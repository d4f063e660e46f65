#pragma once

#include <array>
#include <vector>

#include "readmit/models/scorer.hpp"

namespace readmit {

struct NaiveBayesParams {
  /// Additive smoothing for categorical likelihoods.
  double smoothing = 1.0;
  /// Lower bound on per-class Gaussian variances.
  double variance_floor = 1e-6;
};

/// Categorical likelihoods for nominal features, Gaussian likelihoods for numeric
/// ones, maximum-likelihood class prior. Score is the positive-class posterior.
class NaiveBayes final : public Scorer {
 public:
  static NaiveBayes train(const TrainingSet& train, const NaiveBayesParams& params = {});
  static NaiveBayes from_json(const SchemaShape& shape, const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::kNaiveBayes; }
  nlohmann::json parameters_json() const override;

  /// {P(negative | x), P(positive | x)}.
  std::array<double, 2> posteriors(const EncounterVector& x) const;

 protected:
  double score_unchecked(const EncounterVector& x) const override;

 private:
  explicit NaiveBayes(SchemaShape shape) : Scorer(std::move(shape)) {}

  NaiveBayesParams params_;
  std::array<double, 2> log_prior_{};
  /// Nominal features: log P(value | class), indexed [feature][class][value].
  std::vector<std::array<std::vector<double>, 2>> log_likelihood_;
  /// Numeric features: per-class mean and variance.
  std::vector<std::array<double, 2>> mean_;
  std::vector<std::array<double, 2>> variance_;
};

}  // namespace readmit
