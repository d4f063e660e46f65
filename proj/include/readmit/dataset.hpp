#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace readmit {

enum class Readmitted : std::uint8_t { kUnder30, kOver30, kNo };

std::string_view to_string(Readmitted r);
std::optional<Readmitted> parse_readmitted(std::string_view text);

/// Binary labelings of the three-way readmission outcome.
///  kShortTerm:      "<30" vs (">30" or "NO")
///  kAnyReadmission: ("<30" or ">30") vs "NO"   (also the high-risk ablation task)
///  kDifferentiate:  "<30" vs ">30", readmitted encounters only
enum class Task { kShortTerm, kAnyReadmission, kDifferentiate };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);

/// Whether an encounter with this outcome takes part in the task at all.
constexpr bool in_task(Readmitted r, Task task) {
  return task != Task::kDifferentiate || r != Readmitted::kNo;
}

constexpr bool is_positive(Readmitted r, Task task) {
  switch (task) {
    case Task::kShortTerm:
    case Task::kDifferentiate: return r == Readmitted::kUnder30;
    case Task::kAnyReadmission: return r != Readmitted::kNo;
  }
  return false;
}

enum class FeatureKind { kNominal, kNumeric };

/// Reserved vocabulary entry for nominal values never seen while building a schema.
inline constexpr std::string_view kOtherValue = "<other>";

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::kNominal;
  /// Nominal only. Always ends with kOtherValue.
  std::vector<std::string> values;
  /// Numeric only: "count" or "days".
  std::string unit;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Appends kOtherValue to nominal vocabularies that lack it.
  explicit FeatureSchema(std::vector<FeatureDescriptor> features);

  std::size_t size() const { return features_.size(); }
  const FeatureDescriptor& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureDescriptor>& features() const { return features_; }

  std::optional<std::size_t> find(std::string_view name) const;

  /// Vocabulary index of `value`, or the reserved other index when unseen.
  std::size_t code_of(std::size_t feature, std::string_view value) const;
  std::optional<std::size_t> exact_code_of(std::size_t feature, std::string_view value) const;
  std::size_t other_code(std::size_t feature) const { return features_[feature].values.size() - 1; }
  std::size_t cardinality(std::size_t feature) const { return features_[feature].values.size(); }

  /// Stable hash of names, kinds and vocabularies.
  std::string fingerprint() const;

  FeatureSchema without(std::size_t feature) const;

 private:
  std::vector<FeatureDescriptor> features_;
  std::vector<std::unordered_map<std::string, std::size_t>> lookup_;
};

/// A preprocessed encounter. Nominal features hold their vocabulary code.
struct EncounterVector {
  std::int64_t encounter_id = 0;
  std::vector<double> features;
  Readmitted readmitted = Readmitted::kNo;
};

struct Dataset {
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<EncounterVector> rows;
};

/// Throws DataError when `x` does not conform to `schema`.
void check_conforms(const EncounterVector& x, const FeatureSchema& schema);

Dataset drop_feature(const Dataset& data, std::size_t feature);
Dataset select_rows(const Dataset& data, std::span<const std::size_t> indices);
/// Rows taking part in `task`, in original order.
Dataset restrict_to_task(const Dataset& data, Task task);

std::vector<std::uint8_t> task_labels(std::span<const EncounterVector> rows, Task task);

/// Read-only view handed to learners.
struct TrainingSet {
  const FeatureSchema& schema;
  std::span<const EncounterVector> rows;
  std::span<const std::uint8_t> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t positives() const;
};

}  // namespace readmit
