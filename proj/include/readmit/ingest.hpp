#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readmit {

/// Columns of the public diabetes encounter file, in published order.
inline constexpr std::array<std::string_view, 50> kRawColumns = {
    "encounter_id",
    "patient_nbr",
    "race",
    "gender",
    "age",
    "weight",
    "admission_type_id",
    "discharge_disposition_id",
    "admission_source_id",
    "time_in_hospital",
    "payer_code",
    "medical_specialty",
    "num_lab_procedures",
    "num_procedures",
    "num_medications",
    "number_outpatient",
    "number_emergency",
    "number_inpatient",
    "diag_1",
    "diag_2",
    "diag_3",
    "number_diagnoses",
    "max_glu_serum",
    "A1Cresult",
    "metformin",
    "repaglinide",
    "nateglinide",
    "chlorpropamide",
    "glimepiride",
    "acetohexamide",
    "glipizide",
    "glyburide",
    "tolbutamide",
    "pioglitazone",
    "rosiglitazone",
    "acarbose",
    "miglitol",
    "troglitazone",
    "tolazamide",
    "examide",
    "citoglipton",
    "insulin",
    "glyburide-metformin",
    "glipizide-metformin",
    "glimepiride-pioglitazone",
    "metformin-rosiglitazone",
    "metformin-pioglitazone",
    "change",
    "diabetesMed",
    "readmitted",
};

inline constexpr std::size_t kRawColumnCount = kRawColumns.size();

/// The 23 medication columns, metformin through metformin-pioglitazone.
inline constexpr std::size_t kFirstMedicationColumn = 24;
inline constexpr std::size_t kMedicationColumnCount = 23;

constexpr std::optional<std::size_t> find_raw_column(std::string_view name) {
  for (std::size_t i = 0; i < kRawColumns.size(); ++i) {
    if (kRawColumns[i] == name) return i;
  }
  return std::nullopt;
}

consteval std::size_t raw_column(std::string_view name) {
  const auto idx = find_raw_column(name);
  if (!idx) throw "unknown column";
  return *idx;
}

/// The dataset marks missing values with "?"; blank fields are treated the same way.
constexpr bool is_missing(std::string_view value) { return value.empty() || value == "?"; }

/// One data row with every field kept as the raw text from the file.
struct RawEncounter {
  std::int64_t encounter_id = 0;
  std::int64_t patient_nbr = 0;
  std::array<std::string, kRawColumnCount> values;

  const std::string& operator[](std::size_t column) const { return values[column]; }
  std::string& operator[](std::size_t column) { return values[column]; }
};

struct DatasetLoad {
  std::vector<RawEncounter> rows;
  /// Canonical column index of each file column, in file order.
  std::vector<std::size_t> file_order;
  std::size_t data_row_count = 0;
  /// Blank (not "?") fields seen; counted as missing.
  std::size_t empty_field_count = 0;
};

DatasetLoad parse_dataset(std::istream& in, std::string_view source = "<stream>");
DatasetLoad load_dataset(const std::filesystem::path& path);

/// Re-serializes a row in the column order it was read with.
std::string to_csv_row(const RawEncounter& row, std::span<const std::size_t> file_order);

enum class IdTable { kAdmissionType, kDischargeDisposition, kAdmissionSource };

std::string_view to_string(IdTable table);
std::optional<IdTable> parse_id_table(std::string_view column_name);

struct IdMapping {
  IdTable table;
  int id = 0;
  std::string description;

  bool operator==(const IdMapping&) const = default;
};

/// Accepts the published sectioned layout ("admission_type_id,description" headers
/// followed by "id,description" rows) and flat "table_column,id,description" rows.
std::vector<IdMapping> parse_id_mappings(std::istream& in, std::string_view source = "<stream>");
std::vector<IdMapping> load_id_mappings(const std::filesystem::path& path);

std::optional<std::string> describe_id(std::span<const IdMapping> mappings, IdTable table, int id);

}  // namespace readmit
