#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "readmit/dataset.hpp"
#include "readmit/ingest.hpp"

namespace readmit {

// ---------------------------------------------------------------------------
// Diagnosis grouping

/// Disease families for ICD-9 codes. Ranges follow the grouping table of Strack
/// et al. (BioMed Res. Int. 2014), with the endocrine/metabolic chapter split out
/// of "other" so the diabetes family stands apart from its own chapter:
///   circulatory      390-459, 785
///   respiratory      460-519, 786
///   digestive        520-579, 787
///   diabetes         250.xx
///   injury           800-999
///   musculoskeletal  710-739
///   genitourinary    580-629, 788
///   neoplasms        140-239
///   endocrine        240-279 except 250.xx
///   other            everything else, including V and E codes
/// Some write-ups quote the respiratory range as 450-519; 450-459 are vein and
/// lymphatic disorders and stay circulatory here.
enum class DiagnosisGroup {
  kCirculatory,
  kRespiratory,
  kDigestive,
  kDiabetes,
  kInjury,
  kMusculoskeletal,
  kGenitourinary,
  kNeoplasms,
  kEndocrine,
  kOther,
};

inline constexpr std::size_t kDiagnosisGroupCount = 10;

std::string_view to_string(DiagnosisGroup group);

/// nullopt when the code is neither numeric nor V/E-prefixed.
std::optional<DiagnosisGroup> classify_icd9(std::string_view code);

// ---------------------------------------------------------------------------
// Risk factors

struct RiskFactor {
  std::string_view name;   // source column name, also used in rule items
  std::string_view label;  // human-readable name
  FeatureKind kind;
  std::string_view unit;   // numeric only
};

/// The 22 risk factors retained after preprocessing, in reporting order.
inline constexpr std::array<RiskFactor, 22> kRiskFactors = {{
    {"race", "Race", FeatureKind::kNominal, ""},
    {"gender", "Gender", FeatureKind::kNominal, ""},
    {"age", "Age", FeatureKind::kNominal, ""},
    {"admission_type_id", "Admission Type", FeatureKind::kNominal, ""},
    {"discharge_disposition_id", "Discharge Disposition", FeatureKind::kNominal, ""},
    {"admission_source_id", "Admission Source", FeatureKind::kNominal, ""},
    {"time_in_hospital", "Time in Hospital", FeatureKind::kNumeric, "days"},
    {"num_lab_procedures", "Number of Lab Procedures", FeatureKind::kNumeric, "count"},
    {"num_procedures", "Number of Procedures", FeatureKind::kNumeric, "count"},
    {"num_medications", "Number of Medications", FeatureKind::kNumeric, "count"},
    {"number_outpatient", "Number of Outpatient Visits", FeatureKind::kNumeric, "count"},
    {"number_emergency", "Number of Emergency Visits", FeatureKind::kNumeric, "count"},
    {"number_inpatient", "Number of Inpatient Visits", FeatureKind::kNumeric, "count"},
    {"diag_1", "Diagnosis 1 (Primary)", FeatureKind::kNominal, ""},
    {"diag_2", "Diagnosis 2 (Secondary)", FeatureKind::kNominal, ""},
    {"diag_3", "Diagnosis 3 (Tertiary)", FeatureKind::kNominal, ""},
    {"number_diagnoses", "Number of Diagnoses", FeatureKind::kNumeric, "count"},
    {"max_glu_serum", "Glucose Serum Test", FeatureKind::kNominal, ""},
    {"A1Cresult", "A1C Test Result", FeatureKind::kNominal, ""},
    {"insulin", "Insulin", FeatureKind::kNominal, ""},
    {"change", "Change of Medication", FeatureKind::kNominal, ""},
    {"diabetesMed", "Diabetic Medication", FeatureKind::kNominal, ""},
}};

inline constexpr std::size_t kRiskFactorCount = kRiskFactors.size();

std::optional<std::size_t> find_risk_factor(std::string_view name);

/// Columns excluded for sparsity.
inline constexpr std::array<std::string_view, 3> kSparseColumns = {"weight", "payer_code",
                                                                    "medical_specialty"};

std::vector<std::string> drop_sparse_features(std::span<const std::string> columns);

/// Warning counters accumulated while extracting risk factors.
struct PreprocessCounters {
  std::size_t unparseable_diagnoses = 0;
  std::size_t insulin_missing = 0;
  std::size_t glucose_test_missing = 0;
  std::size_t a1c_missing = 0;
  std::size_t other_missing = 0;
};

/// Insulin is the only medication kept. Missing values read as "No".
std::string reduce_medications(const RawEncounter& raw, PreprocessCounters& counters);

/// Text-level view of one encounter restricted to the 22 risk factors. Diagnoses
/// are replaced by their group name; a missing race or diagnosis stays "?".
struct RiskFactorRecord {
  std::int64_t encounter_id = 0;
  std::array<std::string, kRiskFactorCount> values;
  Readmitted readmitted = Readmitted::kNo;
};

RiskFactorRecord extract_risk_factors(const RawEncounter& raw, PreprocessCounters& counters);

struct FilterResult {
  std::vector<RawEncounter> rows;
  std::size_t removed_missing_race = 0;
  std::size_t removed_missing_diagnosis = 0;
  std::size_t removed_total = 0;
};

/// Drops rows with a missing race or any missing diagnosis. A row missing both is
/// counted under both reasons and once in removed_total.
FilterResult filter_rows(std::span<const RawEncounter> raw);

/// Vocabularies are the sorted distinct values seen in `records` (numerically when
/// every value is an integer) plus the reserved other bucket.
FeatureSchema build_schema(std::span<const RiskFactorRecord> records);

EncounterVector encode(const RiskFactorRecord& record, const FeatureSchema& schema);

/// One indicator per vocabulary entry (including other) for nominal features,
/// numeric features copied through.
std::size_t onehot_width(const FeatureSchema& schema);
std::vector<double> encode_onehot(const EncounterVector& x, const FeatureSchema& schema);

bool label(const EncounterVector& x, Task task);

// ---------------------------------------------------------------------------
// Splits

inline constexpr std::size_t kFoldCount = 5;

/// Positions into the id list given to make_split.
struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::array<std::vector<std::size_t>, kFoldCount> folds;

  /// Training positions outside fold `k`.
  std::vector<std::size_t> fold_complement(std::size_t k) const;
};

/// 75/25 train/test split with five CV folds over the training part. When
/// `strata` is non-empty (one small integer per id) both the split and the folds
/// are stratified on it.
SplitPlan make_split(std::span<const std::int64_t> ids, std::uint64_t seed,
                     std::span<const std::uint8_t> strata = {});

// ---------------------------------------------------------------------------
// Pipeline

struct PreprocessReport {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::size_t removed_missing_race = 0;
  std::size_t removed_missing_diagnosis = 0;
  std::size_t empty_fields = 0;
  std::map<std::string, std::size_t> missing_per_column;
  std::array<std::size_t, 3> class_counts{};  // <30, >30, NO on retained rows
  double mean_time_in_hospital = 0;      // retained rows
  double mean_time_in_hospital_all = 0;  // every loaded row
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  PreprocessCounters counters;
};

struct PreparedData {
  /// Filtered rows encoded with a schema frozen on the training part.
  Dataset data;
  SplitPlan split;
  PreprocessReport report;
};

/// Filter, extract, split (stratified on the three-way outcome) and encode.
PreparedData preprocess(const DatasetLoad& raw, std::uint64_t seed);

/// All loaded rows, unfiltered, encoded with a schema built from every row.
/// Used for descriptive statistics where no train/test separation applies.
Dataset encode_unfiltered(const DatasetLoad& raw);

nlohmann::json to_json(const FeatureSchema& schema);
nlohmann::json to_json(const PreprocessReport& report);

}  // namespace readmit
