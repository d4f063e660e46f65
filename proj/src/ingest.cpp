#include "readmit/ingest.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <unordered_set>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {
namespace {

std::int64_t parse_id(std::string_view text, std::string_view what, std::string_view source,
                      std::size_t line) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + std::string(what) +
                    " is not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

DatasetLoad parse_dataset(std::istream& in, std::string_view source) {
  DatasetLoad out;
  const auto header_line = csv::read_line(in);
  if (!header_line) throw DataError(std::string(source) + ": missing header row");

  const auto header = csv::split_record(*header_line);
  std::vector<bool> seen(kRawColumnCount, false);
  for (const auto& name : header) {
    const auto idx = find_raw_column(trim(name));
    if (!idx) throw DataError(std::string(source) + ":1: unknown column '" + name + "'");
    if (seen[*idx]) throw DataError(std::string(source) + ":1: duplicate column '" + name + "'");
    seen[*idx] = true;
    out.file_order.push_back(*idx);
  }
  for (std::size_t i = 0; i < kRawColumnCount; ++i) {
    if (!seen[i]) {
      throw DataError(std::string(source) + ":1: missing column '" + std::string(kRawColumns[i]) + "'");
    }
  }

  constexpr std::size_t kReadmitted = raw_column("readmitted");
  std::unordered_set<std::int64_t> ids;
  std::size_t line_number = 1;
  while (const auto line = csv::read_line(in)) {
    ++line_number;
    if (line->empty()) continue;
    auto fields = csv::split_record(*line);
    if (fields.size() != out.file_order.size()) {
      throw DataError(std::string(source) + ":" + std::to_string(line_number) + ": expected " +
                      std::to_string(out.file_order.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    RawEncounter row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) ++out.empty_field_count;
      row.values[out.file_order[i]] = std::move(fields[i]);
    }
    row.encounter_id = parse_id(row[0], "encounter_id", source, line_number);
    row.patient_nbr = parse_id(row[1], "patient_nbr", source, line_number);
    const auto& readmitted = row[kReadmitted];
    if (readmitted != "<30" && readmitted != ">30" && readmitted != "NO") {
      throw DataError(std::string(source) + ":" + std::to_string(line_number) +
                      ": unknown readmitted value '" + readmitted + "'");
    }
    if (!ids.insert(row.encounter_id).second) {
      throw DataError(std::string(source) + ":" + std::to_string(line_number) +
                      ": duplicate encounter_id " + std::to_string(row.encounter_id));
    }
    out.rows.push_back(std::move(row));
  }
  out.data_row_count = out.rows.size();
  return out;
}

DatasetLoad load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

std::string to_csv_row(const RawEncounter& row, std::span<const std::size_t> file_order) {
  std::vector<std::string> fields;
  fields.reserve(file_order.size());
  for (const auto idx : file_order) fields.push_back(row[idx]);
  return csv::join_record(fields);
}

std::string_view to_string(IdTable table) {
  switch (table) {
    case IdTable::kAdmissionType: return "admission_type_id";
    case IdTable::kDischargeDisposition: return "discharge_disposition_id";
    case IdTable::kAdmissionSource: return "admission_source_id";
  }
  return "?";
}

std::optional<IdTable> parse_id_table(std::string_view column_name) {
  for (const auto t : {IdTable::kAdmissionType, IdTable::kDischargeDisposition, IdTable::kAdmissionSource}) {
    if (to_string(t) == column_name) return t;
  }
  return std::nullopt;
}

std::vector<IdMapping> parse_id_mappings(std::istream& in, std::string_view source) {
  std::vector<IdMapping> out;
  std::set<std::pair<IdTable, int>> keys;
  IdTable section{};
  bool in_section = false;
  std::size_t line_number = 0;

  auto add = [&](IdTable table, std::string_view id_text, std::string description) {
    const int id = static_cast<int>(parse_id(trim(id_text), "mapping id", source, line_number));
    if (!keys.emplace(table, id).second) {
      throw DataError(std::string(source) + ":" + std::to_string(line_number) + ": duplicate mapping " +
                      std::string(to_string(table)) + "=" + std::to_string(id));
    }
    out.push_back({table, id, trim(description)});
  };

  while (const auto line = csv::read_line(in)) {
    ++line_number;
    const auto fields = csv::split_record(*line);
    bool blank = true;
    for (const auto& f : fields) blank = blank && trim(f).empty();
    if (blank) {
      in_section = false;
      continue;
    }
    const auto first = trim(fields[0]);
    if (const auto table = parse_id_table(first)) {
      if (fields.size() >= 3) {
        // Flat layout: table,id,description (description may itself contain commas).
        std::string description = fields[2];
        for (std::size_t i = 3; i < fields.size(); ++i) description += "," + fields[i];
        add(*table, fields[1], description);
      } else {
        section = *table;
        in_section = true;
      }
      continue;
    }
    if (!in_section) {
      throw DataError(std::string(source) + ":" + std::to_string(line_number) +
                      ": mapping row outside any table section");
    }
    std::string description = fields.size() > 1 ? fields[1] : std::string();
    for (std::size_t i = 2; i < fields.size(); ++i) description += "," + fields[i];
    add(section, fields[0], description);
  }
  return out;
}

std::vector<IdMapping> load_id_mappings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open id mapping file '" + path.string() + "'");
  return parse_id_mappings(in, path.string());
}

std::optional<std::string> describe_id(std::span<const IdMapping> mappings, IdTable table, int id) {
  for (const auto& m : mappings) {
    if (m.table == table && m.id == id) return m.description;
  }
  return std::nullopt;
}

}  // namespace readmit
