#include "readmit/models/training.hpp"

#include "readmit/error.hpp"
#include "readmit/eval.hpp"

namespace readmit {

ModelConfig ModelConfig::with_seed(std::uint64_t seed) const {
  ModelConfig c = *this;
  c.forest.seed = seed;
  c.boost.seed = seed;
  c.mlp.seed = seed;
  return c;
}

std::size_t ModelConfig::size() const {
  switch (kind) {
    case ModelKind::kRandomForest: return forest.n_trees;
    case ModelKind::kAdaBoost: return boost.n_rounds;
    case ModelKind::kMlp: return mlp.hidden_nodes;
    default: return 0;
  }
}

std::unique_ptr<Scorer> train_model(const ModelConfig& config, const TrainingSet& train) {
  switch (config.kind) {
    case ModelKind::kNaiveBayes: return std::make_unique<NaiveBayes>(NaiveBayes::train(train, config.naive_bayes));
    case ModelKind::kBayesNet: return std::make_unique<BayesNet>(BayesNet::train(train, config.bayes_net));
    case ModelKind::kRandomForest: return std::make_unique<RandomForest>(RandomForest::train(train, config.forest));
    case ModelKind::kAdaBoost: return std::make_unique<AdaBoost>(AdaBoost::train(train, config.boost));
    case ModelKind::kMlp: return std::make_unique<Mlp>(Mlp::train(train, config.mlp));
  }
  throw UsageError("unknown model kind");
}

namespace {

std::vector<EncounterVector> gather(const Dataset& data, std::span<const std::size_t> positions, Task task) {
  std::vector<EncounterVector> rows;
  for (const auto p : positions) {
    if (in_task(data.rows[p].readmitted, task)) rows.push_back(data.rows[p]);
  }
  return rows;
}

}  // namespace

CvResult cross_validate(std::span<const ModelConfig> candidates, const Dataset& data, const SplitPlan& split,
                        Task task) {
  if (candidates.empty()) throw UsageError("cross-validation: no candidate configurations");
  CvResult result;
  for (const auto& c : candidates) result.candidates.push_back({c, {}, 0});

  for (std::size_t k = 0; k < kFoldCount; ++k) {
    const auto train_rows = gather(data, split.fold_complement(k), task);
    const auto held_rows = gather(data, split.folds[k], task);
    const auto train_labels = task_labels(train_rows, task);
    const auto held_labels = task_labels(held_rows, task);
    std::size_t held_pos = 0;
    for (const auto y : held_labels) held_pos += y;
    if (held_pos == 0 || held_pos == held_labels.size()) {
      throw DataError("cross-validation: fold " + std::to_string(k) + " has a single class");
    }
    const TrainingSet train{*data.schema, train_rows, train_labels};
    for (auto& cand : result.candidates) {
      const auto model = train_model(cand.config, train);
      const auto scores = score_rows(*model, held_rows);
      cand.fold_auprc[k] = average_precision(pair_scores(scores, held_labels));
    }
  }
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    auto& cand = result.candidates[i];
    double sum = 0;
    for (const double a : cand.fold_auprc) sum += a;
    cand.mean_auprc = sum / static_cast<double>(kFoldCount);
    const auto& best = result.candidates[result.selected];
    if (i > 0 && (cand.mean_auprc > best.mean_auprc ||
                  (cand.mean_auprc == best.mean_auprc && cand.config.size() < best.config.size()))) {
      result.selected = i;
    }
  }
  return result;
}

}  // namespace readmit
