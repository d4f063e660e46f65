#include "readmit/dataset.hpp"

#include <cmath>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {

std::string_view to_string(Readmitted r) {
  switch (r) {
    case Readmitted::kUnder30: return "<30";
    case Readmitted::kOver30: return ">30";
    case Readmitted::kNo: return "NO";
  }
  return "?";
}

std::optional<Readmitted> parse_readmitted(std::string_view text) {
  if (text == "<30") return Readmitted::kUnder30;
  if (text == ">30") return Readmitted::kOver30;
  if (text == "NO") return Readmitted::kNo;
  return std::nullopt;
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kShortTerm: return "short_term";
    case Task::kAnyReadmission: return "any_readmission";
    case Task::kDifferentiate: return "differentiate";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view text) {
  if (text == "short_term" || text == "SHORT_TERM") return Task::kShortTerm;
  if (text == "any_readmission" || text == "ANY_READMISSION" || text == "high_risk" ||
      text == "HIGH_RISK") {
    return Task::kAnyReadmission;
  }
  if (text == "differentiate" || text == "DIFFERENTIATE") return Task::kDifferentiate;
  return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<FeatureDescriptor> features) : features_(std::move(features)) {
  lookup_.resize(features_.size());
  for (std::size_t f = 0; f < features_.size(); ++f) {
    auto& d = features_[f];
    if (d.kind != FeatureKind::kNominal) {
      d.values.clear();
      continue;
    }
    if (d.values.empty() || d.values.back() != kOtherValue) d.values.emplace_back(kOtherValue);
    for (std::size_t v = 0; v < d.values.size(); ++v) {
      if (!lookup_[f].emplace(d.values[v], v).second) {
        throw DataError("feature '" + d.name + "' lists value '" + d.values[v] + "' twice");
      }
    }
  }
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
  for (std::size_t f = 0; f < features_.size(); ++f) {
    if (features_[f].name == name) return f;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::exact_code_of(std::size_t feature, std::string_view value) const {
  const auto& table = lookup_[feature];
  const auto it = table.find(std::string(value));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureSchema::code_of(std::size_t feature, std::string_view value) const {
  return exact_code_of(feature, value).value_or(other_code(feature));
}

std::string FeatureSchema::fingerprint() const {
  std::string canonical;
  for (const auto& d : features_) {
    canonical += d.name;
    canonical += d.kind == FeatureKind::kNominal ? "|N|" : "|R|";
    for (const auto& v : d.values) {
      canonical += v;
      canonical.push_back('\x1f');
    }
    canonical.push_back('\x1e');
  }
  return csv::hex64(csv::fnv1a(canonical));
}

FeatureSchema FeatureSchema::without(std::size_t feature) const {
  auto copy = features_;
  copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(feature));
  return FeatureSchema(std::move(copy));
}

void check_conforms(const EncounterVector& x, const FeatureSchema& schema) {
  if (x.features.size() != schema.size()) {
    throw DataError("encounter " + std::to_string(x.encounter_id) + " has " +
                    std::to_string(x.features.size()) + " features, schema expects " +
                    std::to_string(schema.size()));
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const double v = x.features[f];
    if (!std::isfinite(v) || v < 0) {
      throw DataError("encounter " + std::to_string(x.encounter_id) + ": feature '" + schema[f].name +
                      "' is not a finite non-negative value");
    }
    if (schema[f].kind == FeatureKind::kNominal &&
        (v != std::floor(v) || v >= static_cast<double>(schema.cardinality(f)))) {
      throw DataError("encounter " + std::to_string(x.encounter_id) + ": feature '" + schema[f].name +
                      "' holds an invalid category code");
    }
  }
}

Dataset drop_feature(const Dataset& data, std::size_t feature) {
  Dataset out;
  out.schema = std::make_shared<const FeatureSchema>(data.schema->without(feature));
  out.rows.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    EncounterVector copy = row;
    copy.features.erase(copy.features.begin() + static_cast<std::ptrdiff_t>(feature));
    out.rows.push_back(std::move(copy));
  }
  return out;
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out{data.schema, {}};
  out.rows.reserve(indices.size());
  for (const auto i : indices) out.rows.push_back(data.rows.at(i));
  return out;
}

Dataset restrict_to_task(const Dataset& data, Task task) {
  Dataset out{data.schema, {}};
  for (const auto& row : data.rows) {
    if (in_task(row.readmitted, task)) out.rows.push_back(row);
  }
  return out;
}

std::vector<std::uint8_t> task_labels(std::span<const EncounterVector> rows, Task task) {
  std::vector<std::uint8_t> labels;
  labels.reserve(rows.size());
  for (const auto& row : rows) labels.push_back(is_positive(row.readmitted, task) ? 1 : 0);
  return labels;
}

std::size_t TrainingSet::positives() const {
  std::size_t n = 0;
  for (const auto y : labels) n += y;
  return n;
}

}  // namespace readmit
