#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "readmit/dataset.hpp"

namespace readmit {

enum class ModelKind { kNaiveBayes, kBayesNet, kRandomForest, kAdaBoost, kMlp };

inline constexpr std::array<ModelKind, 5> kAllModelKinds = {
    ModelKind::kNaiveBayes, ModelKind::kBayesNet, ModelKind::kRandomForest, ModelKind::kAdaBoost,
    ModelKind::kMlp};

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

/// What a trained model remembers about the schema it was fit on.
struct SchemaShape {
  std::string fingerprint;
  /// Vocabulary size per nominal feature; 0 marks a numeric feature.
  std::vector<std::size_t> cardinalities;

  static SchemaShape of(const FeatureSchema& schema);
  bool operator==(const SchemaShape&) const = default;
};

/// Common contract for the five learners: a deterministic risk score in [0, 1],
/// higher meaning greater readmission risk. Trained scorers are immutable.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual ModelKind kind() const = 0;

  /// Throws DataError if `x` does not fit the schema the model was trained on.
  double score(const EncounterVector& x) const;

  const SchemaShape& schema_shape() const { return shape_; }

  /// Learned parameters, as stored by save_model.
  virtual nlohmann::json parameters_json() const = 0;

 protected:
  explicit Scorer(SchemaShape shape) : shape_(std::move(shape)) {}

  virtual double score_unchecked(const EncounterVector& x) const = 0;

 private:
  SchemaShape shape_;
};

/// Scores every row. Throws DataError when the dataset schema fingerprint differs
/// from the model's.
std::vector<double> score_all(const Scorer& model, const Dataset& data);
std::vector<double> score_rows(const Scorer& model, std::span<const EncounterVector> rows);

nlohmann::json to_json(const SchemaShape& shape);
SchemaShape schema_shape_from_json(const nlohmann::json& j);

/// Throws DataError unless the training set has both classes.
void require_both_classes(const TrainingSet& train, std::string_view learner);

}  // namespace readmit
