#include "readmit/models/scorer.hpp"

#include <cmath>

#include "readmit/error.hpp"

namespace readmit {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNaiveBayes: return "naive_bayes";
    case ModelKind::kBayesNet: return "bayes_net";
    case ModelKind::kRandomForest: return "random_forest";
    case ModelKind::kAdaBoost: return "adaboost";
    case ModelKind::kMlp: return "mlp";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  for (const auto k : kAllModelKinds) {
    if (to_string(k) == text) return k;
  }
  if (text == "nb") return ModelKind::kNaiveBayes;
  if (text == "bn") return ModelKind::kBayesNet;
  if (text == "rf") return ModelKind::kRandomForest;
  if (text == "ab") return ModelKind::kAdaBoost;
  return std::nullopt;
}

SchemaShape SchemaShape::of(const FeatureSchema& schema) {
  SchemaShape shape;
  shape.fingerprint = schema.fingerprint();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    shape.cardinalities.push_back(schema[f].kind == FeatureKind::kNominal ? schema.cardinality(f) : 0);
  }
  return shape;
}

double Scorer::score(const EncounterVector& x) const {
  if (x.features.size() != shape_.cardinalities.size()) {
    throw DataError("schema mismatch: model expects " + std::to_string(shape_.cardinalities.size()) +
                    " features, encounter " + std::to_string(x.encounter_id) + " has " +
                    std::to_string(x.features.size()));
  }
  for (std::size_t f = 0; f < x.features.size(); ++f) {
    const double v = x.features[f];
    const auto card = shape_.cardinalities[f];
    if (!std::isfinite(v) || (card > 0 && (v < 0 || v >= static_cast<double>(card) || v != std::floor(v)))) {
      throw DataError("schema mismatch: encounter " + std::to_string(x.encounter_id) + " feature " +
                      std::to_string(f) + " is outside the model's schema");
    }
  }
  return score_unchecked(x);
}

std::vector<double> score_rows(const Scorer& model, std::span<const EncounterVector> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& x : rows) out.push_back(model.score(x));
  return out;
}

std::vector<double> score_all(const Scorer& model, const Dataset& data) {
  const auto fp = data.schema->fingerprint();
  if (fp != model.schema_shape().fingerprint) {
    throw DataError("schema mismatch: model fingerprint " + model.schema_shape().fingerprint +
                    ", dataset fingerprint " + fp);
  }
  return score_rows(model, data.rows);
}

nlohmann::json to_json(const SchemaShape& shape) {
  return {{"fingerprint", shape.fingerprint}, {"cardinalities", shape.cardinalities}};
}

SchemaShape schema_shape_from_json(const nlohmann::json& j) {
  SchemaShape s;
  s.fingerprint = j.at("fingerprint").get<std::string>();
  s.cardinalities = j.at("cardinalities").get<std::vector<std::size_t>>();
  return s;
}

void require_both_classes(const TrainingSet& train, std::string_view learner) {
  if (train.labels.size() != train.rows.size()) {
    throw DataError(std::string(learner) + ": label count does not match row count");
  }
  const auto pos = train.positives();
  if (pos == 0 || pos == train.size()) {
    throw DataError(std::string(learner) + " needs at least one example of each class");
  }
}

}  // namespace readmit
