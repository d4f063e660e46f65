#include "readmit/models/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "readmit/error.hpp"

namespace readmit {

NaiveBayes NaiveBayes::train(const TrainingSet& train, const NaiveBayesParams& params) {
  require_both_classes(train, "naive Bayes");
  if (params.smoothing < 0 || params.variance_floor <= 0) {
    throw UsageError("naive Bayes: smoothing must be >= 0 and variance floor > 0");
  }
  NaiveBayes model(SchemaShape::of(train.schema));
  model.params_ = params;
  const auto& cards = model.schema_shape().cardinalities;
  const std::size_t n_features = cards.size();

  std::array<double, 2> class_count{};
  for (const auto y : train.labels) class_count[y] += 1;
  for (int c = 0; c < 2; ++c) model.log_prior_[c] = std::log(class_count[c] / static_cast<double>(train.size()));

  model.log_likelihood_.resize(n_features);
  model.mean_.assign(n_features, {0.0, 0.0});
  model.variance_.assign(n_features, {0.0, 0.0});

  for (std::size_t f = 0; f < n_features; ++f) {
    if (cards[f] > 0) {
      std::array<std::vector<double>, 2> counts{std::vector<double>(cards[f], 0.0),
                                                std::vector<double>(cards[f], 0.0)};
      for (std::size_t i = 0; i < train.size(); ++i) {
        counts[train.labels[i]][static_cast<std::size_t>(train.rows[i].features[f])] += 1;
      }
      for (int c = 0; c < 2; ++c) {
        const double denom = class_count[c] + params.smoothing * static_cast<double>(cards[f]);
        auto& ll = model.log_likelihood_[f][c];
        ll.resize(cards[f]);
        for (std::size_t v = 0; v < cards[f]; ++v) ll[v] = std::log((counts[c][v] + params.smoothing) / denom);
      }
    } else {
      std::array<double, 2> sum{}, sum_sq{};
      for (std::size_t i = 0; i < train.size(); ++i) {
        const double v = train.rows[i].features[f];
        sum[train.labels[i]] += v;
        sum_sq[train.labels[i]] += v * v;
      }
      for (int c = 0; c < 2; ++c) {
        const double mean = sum[c] / class_count[c];
        const double var = sum_sq[c] / class_count[c] - mean * mean;
        model.mean_[f][c] = mean;
        model.variance_[f][c] = std::max(var, params.variance_floor);
      }
    }
  }
  return model;
}

std::array<double, 2> NaiveBayes::posteriors(const EncounterVector& x) const {
  const auto& cards = schema_shape().cardinalities;
  std::array<double, 2> log_joint = log_prior_;
  for (std::size_t f = 0; f < cards.size(); ++f) {
    for (int c = 0; c < 2; ++c) {
      if (cards[f] > 0) {
        log_joint[c] += log_likelihood_[f][c][static_cast<std::size_t>(x.features[f])];
      } else {
        const double d = x.features[f] - mean_[f][c];
        const double var = variance_[f][c];
        log_joint[c] += -0.5 * std::log(2 * std::numbers::pi * var) - d * d / (2 * var);
      }
    }
  }
  const double m = std::max(log_joint[0], log_joint[1]);
  if (std::isinf(m) && m < 0) {
    // Unsmoothed model and a value unseen in both classes: fall back to the prior.
    const double p1 = std::exp(log_prior_[1]);
    return {1 - p1, p1};
  }
  const double e0 = std::exp(log_joint[0] - m);
  const double e1 = std::exp(log_joint[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double NaiveBayes::score_unchecked(const EncounterVector& x) const { return posteriors(x)[1]; }

nlohmann::json NaiveBayes::parameters_json() const {
  nlohmann::json features = nlohmann::json::array();
  const auto& cards = schema_shape().cardinalities;
  for (std::size_t f = 0; f < cards.size(); ++f) {
    if (cards[f] > 0) {
      features.push_back({{"log_likelihood", {log_likelihood_[f][0], log_likelihood_[f][1]}}});
    } else {
      features.push_back({{"mean", mean_[f]}, {"variance", variance_[f]}});
    }
  }
  return {{"smoothing", params_.smoothing},
          {"variance_floor", params_.variance_floor},
          {"log_prior", log_prior_},
          {"features", std::move(features)}};
}

NaiveBayes NaiveBayes::from_json(const SchemaShape& shape, const nlohmann::json& j) {
  NaiveBayes model(shape);
  model.params_.smoothing = j.at("smoothing").get<double>();
  model.params_.variance_floor = j.at("variance_floor").get<double>();
  model.log_prior_ = j.at("log_prior").get<std::array<double, 2>>();
  const auto& features = j.at("features");
  const auto& cards = shape.cardinalities;
  if (features.size() != cards.size()) throw DataError("naive Bayes model: feature count mismatch");
  model.log_likelihood_.resize(cards.size());
  model.mean_.assign(cards.size(), {0.0, 0.0});
  model.variance_.assign(cards.size(), {0.0, 0.0});
  for (std::size_t f = 0; f < cards.size(); ++f) {
    if (cards[f] > 0) {
      const auto& ll = features[f].at("log_likelihood");
      model.log_likelihood_[f] = {ll.at(0).get<std::vector<double>>(), ll.at(1).get<std::vector<double>>()};
    } else {
      model.mean_[f] = features[f].at("mean").get<std::array<double, 2>>();
      model.variance_[f] = features[f].at("variance").get<std::array<double, 2>>();
    }
  }
  return model;
}

}  // namespace readmit
