#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "readmit/models/adaboost.hpp"
#include "readmit/models/bayes_net.hpp"
#include "readmit/models/mlp.hpp"
#include "readmit/models/naive_bayes.hpp"
#include "readmit/models/random_forest.hpp"
#include "readmit/preprocess.hpp"

namespace readmit {

/// A learner together with its hyperparameters.
struct ModelConfig {
  ModelKind kind = ModelKind::kNaiveBayes;
  NaiveBayesParams naive_bayes;
  BayesNetParams bayes_net;
  ForestParams forest;
  BoostParams boost;
  MlpParams mlp;

  /// Copy with every learner seeded from `seed`.
  ModelConfig with_seed(std::uint64_t seed) const;
  /// Trees, rounds or hidden nodes; 0 for the Bayesian learners.
  std::size_t size() const;
};

std::unique_ptr<Scorer> train_model(const ModelConfig& config, const TrainingSet& train);

struct CvCandidate {
  ModelConfig config;
  std::array<double, kFoldCount> fold_auprc{};
  double mean_auprc = 0;
};

struct CvResult {
  std::vector<CvCandidate> candidates;
  std::size_t selected = 0;
};

/// Each candidate is trained on four folds and scored by AUPRC on the fifth.
/// Rows outside `task` are ignored. The best mean AUPRC wins; ties go to the
/// smaller model, then to the earlier candidate. Throws DataError when a
/// held-out fold lacks one of the classes.
CvResult cross_validate(std::span<const ModelConfig> candidates, const Dataset& data, const SplitPlan& split,
                        Task task);

}  // namespace readmit
