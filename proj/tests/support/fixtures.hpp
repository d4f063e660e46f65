#pragma once

#include <memory>
#include <string>
#include <vector>

#include "readmit/dataset.hpp"

namespace readmit::testing {

/// Small hand-built training sets for model tests.
struct Toy {
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<EncounterVector> rows;
  std::vector<std::uint8_t> labels;

  TrainingSet view() const { return {*schema, rows, labels}; }
  Dataset dataset() const { return {schema, rows}; }
};

inline FeatureDescriptor nominal(std::string name, std::vector<std::string> values) {
  return {std::move(name), FeatureKind::kNominal, std::move(values), ""};
}

inline FeatureDescriptor numeric(std::string name) { return {std::move(name), FeatureKind::kNumeric, {}, "count"}; }

/// Labels map to outcomes: 1 -> "<30", 0 -> "NO".
inline Toy make_toy(std::vector<FeatureDescriptor> features, const std::vector<std::vector<double>>& xs,
                    const std::vector<int>& ys) {
  Toy t;
  t.schema = std::make_shared<const FeatureSchema>(std::move(features));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EncounterVector x;
    x.encounter_id = static_cast<std::int64_t>(i + 1);
    x.features = xs[i];
    x.readmitted = ys[i] ? Readmitted::kUnder30 : Readmitted::kNo;
    t.rows.push_back(std::move(x));
    t.labels.push_back(static_cast<std::uint8_t>(ys[i]));
  }
  return t;
}

}  // namespace readmit::testing
