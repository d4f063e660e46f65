#include "readmit/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "readmit/error.hpp"
#include "readmit/rng.hpp"

namespace readmit {
namespace {

constexpr std::size_t kRace = raw_column("race");
constexpr std::size_t kInsulin = raw_column("insulin");
constexpr std::size_t kTimeInHospital = raw_column("time_in_hospital");
constexpr std::array<std::size_t, 3> kDiagColumns = {raw_column("diag_1"), raw_column("diag_2"),
                                                     raw_column("diag_3")};

constexpr std::string_view kMissingToken = "?";

std::optional<double> parse_number(std::string_view text) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool has_missing_diagnosis(const RawEncounter& row) {
  return std::any_of(kDiagColumns.begin(), kDiagColumns.end(),
                     [&](std::size_t c) { return is_missing(row[c]); });
}

std::vector<std::string> ordered_vocabulary(const std::set<std::string>& distinct) {
  std::vector<std::string> values(distinct.begin(), distinct.end());
  const bool all_integer = std::all_of(values.begin(), values.end(),
                                       [](const std::string& v) { return parse_integer(v).has_value(); });
  if (all_integer) {
    std::stable_sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) {
      return *parse_integer(a) < *parse_integer(b);
    });
  }
  return values;
}

}  // namespace

std::string_view to_string(DiagnosisGroup group) {
  switch (group) {
    case DiagnosisGroup::kCirculatory: return "circulatory";
    case DiagnosisGroup::kRespiratory: return "respiratory";
    case DiagnosisGroup::kDigestive: return "digestive";
    case DiagnosisGroup::kDiabetes: return "diabetes";
    case DiagnosisGroup::kInjury: return "injury";
    case DiagnosisGroup::kMusculoskeletal: return "musculoskeletal";
    case DiagnosisGroup::kGenitourinary: return "genitourinary";
    case DiagnosisGroup::kNeoplasms: return "neoplasms";
    case DiagnosisGroup::kEndocrine: return "endocrine";
    case DiagnosisGroup::kOther: return "other";
  }
  return "other";
}

std::optional<DiagnosisGroup> classify_icd9(std::string_view code) {
  code = trim(code);
  if (code.empty()) return std::nullopt;
  if (code.front() == 'V' || code.front() == 'v' || code.front() == 'E' || code.front() == 'e') {
    if (code.size() < 2) return std::nullopt;
    return DiagnosisGroup::kOther;
  }
  const auto parsed = parse_number(code);
  if (!parsed || !std::isfinite(*parsed) || *parsed < 0) return std::nullopt;
  const double v = *parsed;
  const double chapter = std::floor(v);

  if (chapter == 250) return DiagnosisGroup::kDiabetes;
  if ((v >= 390 && v < 460) || chapter == 785) return DiagnosisGroup::kCirculatory;
  if ((v >= 460 && v < 520) || chapter == 786) return DiagnosisGroup::kRespiratory;
  if ((v >= 520 && v < 580) || chapter == 787) return DiagnosisGroup::kDigestive;
  if (v >= 800 && v < 1000) return DiagnosisGroup::kInjury;
  if (v >= 710 && v < 740) return DiagnosisGroup::kMusculoskeletal;
  if ((v >= 580 && v < 630) || chapter == 788) return DiagnosisGroup::kGenitourinary;
  if (v >= 140 && v < 240) return DiagnosisGroup::kNeoplasms;
  if (v >= 240 && v < 280) return DiagnosisGroup::kEndocrine;
  return DiagnosisGroup::kOther;
}

std::optional<std::size_t> find_risk_factor(std::string_view name) {
  for (std::size_t i = 0; i < kRiskFactors.size(); ++i) {
    if (kRiskFactors[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> drop_sparse_features(std::span<const std::string> columns) {
  std::vector<std::string> kept;
  for (const auto& c : columns) {
    if (std::find(kSparseColumns.begin(), kSparseColumns.end(), c) == kSparseColumns.end()) {
      kept.push_back(c);
    }
  }
  return kept;
}

std::string reduce_medications(const RawEncounter& raw, PreprocessCounters& counters) {
  const auto& insulin = raw[kInsulin];
  if (is_missing(insulin)) {
    ++counters.insulin_missing;
    return "No";
  }
  return insulin;
}

RiskFactorRecord extract_risk_factors(const RawEncounter& raw, PreprocessCounters& counters) {
  RiskFactorRecord rec;
  rec.encounter_id = raw.encounter_id;
  rec.readmitted = *parse_readmitted(raw[raw_column("readmitted")]);

  for (std::size_t f = 0; f < kRiskFactors.size(); ++f) {
    const auto& factor = kRiskFactors[f];
    const auto column = *find_raw_column(factor.name);
    const std::string& text = raw[column];
    std::string& out = rec.values[f];

    if (factor.name == "insulin") {
      out = reduce_medications(raw, counters);
    } else if (factor.kind == FeatureKind::kNumeric) {
      const auto value = parse_integer(trim(text));
      if (!value || *value < 0) {
        throw DataError("encounter " + std::to_string(raw.encounter_id) + ": " + std::string(factor.name) +
                        " is not a non-negative integer: '" + text + "'");
      }
      out = std::to_string(*value);
    } else if (factor.name.starts_with("diag_")) {
      if (is_missing(text)) {
        out = kMissingToken;
      } else if (const auto group = classify_icd9(text)) {
        out = to_string(*group);
      } else {
        ++counters.unparseable_diagnoses;
        out = to_string(DiagnosisGroup::kOther);
      }
    } else if (factor.name == "max_glu_serum" || factor.name == "A1Cresult") {
      // Blank means the test was not taken, same as "None".
      if (is_missing(text)) {
        ++(factor.name == "A1Cresult" ? counters.a1c_missing : counters.glucose_test_missing);
        out = "None";
      } else {
        out = text;
      }
    } else if (is_missing(text)) {
      if (column != kRace) ++counters.other_missing;
      out = kMissingToken;
    } else {
      out = text;
    }
  }
  return rec;
}

FilterResult filter_rows(std::span<const RawEncounter> raw) {
  FilterResult out;
  for (const auto& row : raw) {
    const bool no_race = is_missing(row[kRace]);
    const bool no_diag = has_missing_diagnosis(row);
    out.removed_missing_race += no_race;
    out.removed_missing_diagnosis += no_diag;
    if (no_race || no_diag) {
      ++out.removed_total;
    } else {
      out.rows.push_back(row);
    }
  }
  return out;
}

FeatureSchema build_schema(std::span<const RiskFactorRecord> records) {
  std::vector<FeatureDescriptor> features;
  for (std::size_t f = 0; f < kRiskFactors.size(); ++f) {
    const auto& factor = kRiskFactors[f];
    FeatureDescriptor d;
    d.name = factor.name;
    d.kind = factor.kind;
    if (factor.kind == FeatureKind::kNumeric) {
      d.unit = factor.unit;
    } else {
      std::set<std::string> distinct;
      for (const auto& r : records) distinct.insert(r.values[f]);
      d.values = ordered_vocabulary(distinct);
    }
    features.push_back(std::move(d));
  }
  return FeatureSchema(std::move(features));
}

EncounterVector encode(const RiskFactorRecord& record, const FeatureSchema& schema) {
  if (schema.size() != kRiskFactorCount) {
    throw DataError("schema has " + std::to_string(schema.size()) + " features, expected " +
                    std::to_string(kRiskFactorCount));
  }
  EncounterVector x;
  x.encounter_id = record.encounter_id;
  x.readmitted = record.readmitted;
  x.features.resize(kRiskFactorCount);
  for (std::size_t f = 0; f < kRiskFactorCount; ++f) {
    if (schema[f].kind == FeatureKind::kNominal) {
      x.features[f] = static_cast<double>(schema.code_of(f, record.values[f]));
    } else {
      x.features[f] = parse_number(record.values[f]).value_or(0.0);
    }
  }
  return x;
}

std::size_t onehot_width(const FeatureSchema& schema) {
  std::size_t width = 0;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    width += schema[f].kind == FeatureKind::kNominal ? schema.cardinality(f) : 1;
  }
  return width;
}

std::vector<double> encode_onehot(const EncounterVector& x, const FeatureSchema& schema) {
  check_conforms(x, schema);
  std::vector<double> out(onehot_width(schema), 0.0);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].kind == FeatureKind::kNominal) {
      out[offset + static_cast<std::size_t>(x.features[f])] = 1.0;
      offset += schema.cardinality(f);
    } else {
      out[offset++] = x.features[f];
    }
  }
  return out;
}

bool label(const EncounterVector& x, Task task) { return is_positive(x.readmitted, task); }

std::vector<std::size_t> SplitPlan::fold_complement(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < kFoldCount; ++j) {
    if (j != k) out.insert(out.end(), folds[j].begin(), folds[j].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SplitPlan make_split(std::span<const std::int64_t> ids, std::uint64_t seed,
                     std::span<const std::uint8_t> strata) {
  if (ids.empty()) throw DataError("cannot split an empty id list");
  if (!strata.empty() && strata.size() != ids.size()) {
    throw DataError("strata size does not match id count");
  }
  const std::size_t n = ids.size();
  const std::size_t n_train = (3 * n + 2) / 4;  // round(0.75 n), halves up
  if (n_train < kFoldCount) {
    throw DataError("split needs at least " + std::to_string(kFoldCount) + " training ids, got " +
                    std::to_string(n_train));
  }

  std::size_t n_strata = 1;
  for (const auto s : strata) n_strata = std::max<std::size_t>(n_strata, s + 1u);
  std::vector<std::vector<std::size_t>> members(n_strata);
  for (std::size_t i = 0; i < n; ++i) members[strata.empty() ? 0 : strata[i]].push_back(i);

  // Largest-remainder allocation keeps |train| at round(0.75 n) exactly.
  std::vector<std::size_t> quota(n_strata);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t allocated = 0;
  for (std::size_t s = 0; s < n_strata; ++s) {
    const double exact = 0.75 * static_cast<double>(members[s].size());
    quota[s] = static_cast<std::size_t>(std::floor(exact));
    allocated += quota[s];
    remainders.emplace_back(exact - std::floor(exact), s);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; allocated < n_train && k < remainders.size(); ++k) {
    const auto s = remainders[k].second;
    if (quota[s] < members[s].size()) {
      ++quota[s];
      ++allocated;
    }
  }

  SplitPlan plan;
  plan.seed = seed;
  Rng rng(derive_seed(seed, 0x5917));
  std::size_t next_fold = 0;
  for (std::size_t s = 0; s < n_strata; ++s) {
    auto& m = members[s];
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k < quota[s]) {
        plan.train.push_back(m[k]);
        plan.folds[next_fold].push_back(m[k]);
        next_fold = (next_fold + 1) % kFoldCount;
      } else {
        plan.test.push_back(m[k]);
      }
    }
  }
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

PreparedData preprocess(const DatasetLoad& raw, std::uint64_t seed) {
  PreparedData out;
  auto& report = out.report;
  report.rows_in = raw.rows.size();
  report.empty_fields = raw.empty_field_count;
  for (std::size_t c = 0; c < kRawColumnCount; ++c) {
    std::size_t missing = 0;
    for (const auto& row : raw.rows) missing += is_missing(row[c]);
    report.missing_per_column[std::string(kRawColumns[c])] = missing;
  }
  double stay_all = 0;
  std::size_t stay_rows = 0;
  for (const auto& row : raw.rows) {
    if (const auto v = parse_number(trim(row[kTimeInHospital]))) {
      stay_all += *v;
      ++stay_rows;
    }
  }
  report.mean_time_in_hospital_all = stay_rows == 0 ? 0.0 : stay_all / static_cast<double>(stay_rows);

  auto filtered = filter_rows(raw.rows);
  report.removed_missing_race = filtered.removed_missing_race;
  report.removed_missing_diagnosis = filtered.removed_missing_diagnosis;
  report.rows_out = filtered.rows.size();

  std::vector<RiskFactorRecord> records;
  records.reserve(filtered.rows.size());
  for (const auto& row : filtered.rows) records.push_back(extract_risk_factors(row, report.counters));

  std::vector<std::int64_t> ids;
  std::vector<std::uint8_t> strata;
  double stay = 0;
  const auto stay_index = *find_risk_factor("time_in_hospital");
  for (const auto& r : records) {
    ids.push_back(r.encounter_id);
    strata.push_back(static_cast<std::uint8_t>(r.readmitted));
    ++report.class_counts[static_cast<std::size_t>(r.readmitted)];
    stay += *parse_number(r.values[stay_index]);
  }
  report.mean_time_in_hospital = records.empty() ? 0.0 : stay / static_cast<double>(records.size());

  out.split = make_split(ids, seed, strata);
  report.train_rows = out.split.train.size();
  report.test_rows = out.split.test.size();

  std::vector<RiskFactorRecord> training;
  training.reserve(out.split.train.size());
  for (const auto i : out.split.train) training.push_back(records[i]);
  auto schema = std::make_shared<const FeatureSchema>(build_schema(training));

  out.data.schema = schema;
  out.data.rows.reserve(records.size());
  for (const auto& r : records) out.data.rows.push_back(encode(r, *schema));
  return out;
}

Dataset encode_unfiltered(const DatasetLoad& raw) {
  PreprocessCounters counters;
  std::vector<RiskFactorRecord> records;
  records.reserve(raw.rows.size());
  for (const auto& row : raw.rows) records.push_back(extract_risk_factors(row, counters));
  Dataset out;
  out.schema = std::make_shared<const FeatureSchema>(build_schema(records));
  out.rows.reserve(records.size());
  for (const auto& r : records) out.rows.push_back(encode(r, *out.schema));
  return out;
}

nlohmann::json to_json(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& d : schema.features()) {
    nlohmann::json f{{"name", d.name}, {"kind", d.kind == FeatureKind::kNominal ? "nominal" : "numeric"}};
    if (d.kind == FeatureKind::kNominal) {
      f["values"] = d.values;
    } else {
      f["unit"] = d.unit;
    }
    features.push_back(std::move(f));
  }
  return {{"fingerprint", schema.fingerprint()}, {"features", std::move(features)}};
}

nlohmann::json to_json(const PreprocessReport& r) {
  const double total = static_cast<double>(std::max<std::size_t>(r.rows_out, 1));
  nlohmann::json classes = nlohmann::json::object();
  for (const auto c : {Readmitted::kUnder30, Readmitted::kOver30, Readmitted::kNo}) {
    const auto count = r.class_counts[static_cast<std::size_t>(c)];
    classes[std::string(to_string(c))] = {{"count", count},
                                          {"fraction", static_cast<double>(count) / total}};
  }
  return {
      {"rows_in", r.rows_in},
      {"rows_out", r.rows_out},
      {"removed", {{"missing_race", r.removed_missing_race},
                   {"missing_diagnosis", r.removed_missing_diagnosis},
                   {"total", r.rows_in - r.rows_out}}},
      {"dropped_sparse_columns", kSparseColumns},
      {"missing_per_column", r.missing_per_column},
      {"empty_fields", r.empty_fields},
      {"class_distribution", classes},
      {"mean_time_in_hospital", r.mean_time_in_hospital},
      {"mean_time_in_hospital_all_rows", r.mean_time_in_hospital_all},
      {"train_rows", r.train_rows},
      {"test_rows", r.test_rows},
      {"warnings", {{"unparseable_diagnoses", r.counters.unparseable_diagnoses},
                    {"insulin_missing", r.counters.insulin_missing},
                    {"glucose_test_missing", r.counters.glucose_test_missing},
                    {"a1c_missing", r.counters.a1c_missing},
                    {"other_missing", r.counters.other_missing}}},
  };
}

}  // namespace readmit
