#include "readmit/models/adaboost.hpp"

#include <cmath>

#include "readmit/error.hpp"

namespace readmit {

namespace {

constexpr double kMinError = 1e-10;

double weak_vote(const DecisionTree& tree, std::span<const double> x) { return tree.predict(x) > 0.5 ? 1.0 : -1.0; }

}  // namespace

std::string_view to_string(BoostStop stop) {
  switch (stop) {
    case BoostStop::kRoundLimit: return "round_limit";
    case BoostStop::kPerfectLearner: return "perfect_learner";
    case BoostStop::kWeakLearnerTooWeak: return "weak_learner_error_at_least_half";
  }
  return "?";
}

AdaBoost AdaBoost::train(const TrainingSet& train, const BoostParams& params) {
  if (params.n_rounds < 1 || params.weak_tree_depth < 1) {
    throw UsageError("AdaBoost: n_rounds and weak_tree_depth must be >= 1");
  }
  require_both_classes(train, "AdaBoost");
  AdaBoost model(SchemaShape::of(train.schema));
  model.params_ = params;

  const std::size_t n = train.size();
  const auto binned = BinnedFeatures::build(train.schema, train.rows);
  TreeOptions options;
  options.max_depth = params.weak_tree_depth;
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<double> votes(n);

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    // All features are examined, so the stream only matters for future options.
    Rng rng(derive_seed(params.seed, round));
    auto tree = DecisionTree::grow(binned, train.labels, weights, options, rng);
    double error = 0;
    for (std::size_t i = 0; i < n; ++i) {
      votes[i] = weak_vote(tree, train.rows[i].features);
      const bool wrong = (votes[i] > 0) != (train.labels[i] != 0);
      if (wrong) error += weights[i];
    }
    if (error >= 0.5) {
      model.stop_ = BoostStop::kWeakLearnerTooWeak;
      break;
    }
    const bool perfect = error <= 0;
    const double clamped = std::max(error, kMinError);
    const double alpha = 0.5 * std::log((1 - clamped) / clamped);
    model.rounds_.push_back({std::move(tree), alpha, error});
    if (perfect) {
      model.stop_ = BoostStop::kPerfectLearner;
      break;
    }
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = train.labels[i] ? 1.0 : -1.0;
      weights[i] *= std::exp(-alpha * y * votes[i]);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
  }
  if (model.rounds_.empty()) {
    throw NumericalError("AdaBoost: the first weak learner has weighted error >= 0.5");
  }
  return model;
}

double AdaBoost::margin(const EncounterVector& x) const {
  double m = 0;
  for (const auto& r : rounds_) m += r.alpha * weak_vote(r.tree, x.features);
  return m;
}

double AdaBoost::score_unchecked(const EncounterVector& x) const { return 1.0 / (1.0 + std::exp(-2.0 * margin(x))); }

nlohmann::json AdaBoost::parameters_json() const {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : rounds_) {
    rounds.push_back({{"alpha", r.alpha}, {"weighted_error", r.weighted_error}, {"tree", r.tree.to_json()}});
  }
  return {{"n_rounds", params_.n_rounds},
          {"weak_tree_depth", params_.weak_tree_depth},
          {"seed", params_.seed},
          {"stop_reason", to_string(stop_)},
          {"rounds", std::move(rounds)}};
}

AdaBoost AdaBoost::from_json(const SchemaShape& shape, const nlohmann::json& j) {
  AdaBoost model(shape);
  model.params_.n_rounds = j.at("n_rounds").get<std::size_t>();
  model.params_.weak_tree_depth = j.at("weak_tree_depth").get<std::size_t>();
  model.params_.seed = j.at("seed").get<std::uint64_t>();
  const auto stop = j.at("stop_reason").get<std::string>();
  bool known = false;
  for (const auto s : {BoostStop::kRoundLimit, BoostStop::kPerfectLearner, BoostStop::kWeakLearnerTooWeak}) {
    if (to_string(s) == stop) {
      model.stop_ = s;
      known = true;
    }
  }
  if (!known) throw DataError("AdaBoost model: unknown stop reason " + stop);
  for (const auto& r : j.at("rounds")) {
    model.rounds_.push_back(
        {DecisionTree::from_json(r.at("tree")), r.at("alpha").get<double>(), r.at("weighted_error").get<double>()});
  }
  if (model.rounds_.empty()) throw DataError("AdaBoost model: no rounds");
  return model;
}

}  // namespace readmit
