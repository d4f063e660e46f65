#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "readmit/error.hpp"
#include "readmit/preprocess.hpp"
#include "synthetic.hpp"

using namespace readmit;

namespace {

DatasetLoad synthetic(std::size_t rows, std::uint64_t seed) {
  std::istringstream in(testing::synthetic_dataset_csv(rows, seed));
  return parse_dataset(in);
}

RawEncounter complete_row() { return synthetic(1, 1).rows.front(); }

}  // namespace

TEST_CASE("filter_rows drops missing race or diagnosis and counts both") {
  auto a = complete_row();
  a[raw_column("race")] = "Caucasian";
  for (const auto* d : {"diag_1", "diag_2", "diag_3"}) a[*find_raw_column(d)] = "428";
  auto no_race = a;
  no_race[raw_column("race")] = "?";
  auto no_diag = a;
  no_diag[raw_column("diag_3")] = "?";
  auto neither = no_race;
  neither[raw_column("diag_1")] = "?";

  const std::vector<RawEncounter> rows = {a, no_race, no_diag, neither};
  const auto r = filter_rows(rows);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].encounter_id == a.encounter_id);
  CHECK(r.removed_missing_race == 2);
  CHECK(r.removed_missing_diagnosis == 2);
  CHECK(r.removed_total == 3);
}

TEST_CASE("sparse columns are dropped") {
  const std::vector<std::string> cols(kRawColumns.begin(), kRawColumns.end());
  const auto kept = drop_sparse_features(cols);
  for (const auto* gone : {"weight", "payer_code", "medical_specialty"}) {
    CHECK(std::find(kept.begin(), kept.end(), gone) == kept.end());
  }
  CHECK(std::find(kept.begin(), kept.end(), "race") != kept.end());
  CHECK(kept.size() == cols.size() - 3);
}

TEST_CASE("ICD-9 grouping") {
  CHECK(classify_icd9("786.0") == DiagnosisGroup::kRespiratory);
  CHECK(classify_icd9("250.0") == DiagnosisGroup::kDiabetes);
  CHECK(classify_icd9("250.83") == DiagnosisGroup::kDiabetes);
  CHECK(classify_icd9("V45") == DiagnosisGroup::kOther);
  CHECK(classify_icd9("E888") == DiagnosisGroup::kOther);
  CHECK(classify_icd9("428") == DiagnosisGroup::kCirculatory);
  CHECK(classify_icd9("455") == DiagnosisGroup::kCirculatory);
  CHECK(classify_icd9("460") == DiagnosisGroup::kRespiratory);
  CHECK(classify_icd9("519.9") == DiagnosisGroup::kRespiratory);
  CHECK(classify_icd9("785") == DiagnosisGroup::kCirculatory);
  CHECK(classify_icd9("787") == DiagnosisGroup::kDigestive);
  CHECK(classify_icd9("579") == DiagnosisGroup::kDigestive);
  CHECK(classify_icd9("800") == DiagnosisGroup::kInjury);
  CHECK(classify_icd9("999") == DiagnosisGroup::kInjury);
  CHECK(classify_icd9("715") == DiagnosisGroup::kMusculoskeletal);
  CHECK(classify_icd9("788") == DiagnosisGroup::kGenitourinary);
  CHECK(classify_icd9("599") == DiagnosisGroup::kGenitourinary);
  CHECK(classify_icd9("153") == DiagnosisGroup::kNeoplasms);
  CHECK(classify_icd9("276") == DiagnosisGroup::kEndocrine);
  CHECK(classify_icd9("038") == DiagnosisGroup::kOther);
  CHECK(!classify_icd9("abc"));
  CHECK(!classify_icd9("-4"));

  // Total over a dense sweep: every code lands in exactly one of the ten groups.
  std::set<DiagnosisGroup> seen;
  for (int c = 1; c < 1000; ++c) {
    const auto g = classify_icd9(std::to_string(c));
    REQUIRE(g.has_value());
    seen.insert(*g);
  }
  seen.insert(*classify_icd9("V01"));
  CHECK(seen.size() == kDiagnosisGroupCount);
}

TEST_CASE("unparseable diagnoses go to other with a warning") {
  auto row = complete_row();
  row[raw_column("diag_2")] = "garbage";
  PreprocessCounters counters;
  const auto rec = extract_risk_factors(row, counters);
  CHECK(rec.values[*find_risk_factor("diag_2")] == "other");
  CHECK(counters.unparseable_diagnoses == 1);
}

TEST_CASE("insulin is the only medication; missing reads as No") {
  auto row = complete_row();
  row[raw_column("insulin")] = "Steady";
  PreprocessCounters counters;
  CHECK(reduce_medications(row, counters) == "Steady");
  row[raw_column("insulin")] = "?";
  CHECK(reduce_medications(row, counters) == "No");
  CHECK(counters.insulin_missing == 1);
  CHECK(!find_risk_factor("metformin"));
  CHECK(find_risk_factor("insulin"));
}

TEST_CASE("risk factors: 22, in reporting order") {
  CHECK(kRiskFactorCount == 22);
  CHECK(kRiskFactors.front().name == "race");
  CHECK(kRiskFactors.back().name == "diabetesMed");
  std::size_t numeric = 0;
  for (const auto& f : kRiskFactors) numeric += f.kind == FeatureKind::kNumeric;
  CHECK(numeric == 8);
}

TEST_CASE("one-hot encoding") {
  std::vector<RiskFactorRecord> records;
  PreprocessCounters counters;
  auto base = complete_row();
  for (int t = 1; t <= 8; ++t) {
    base[raw_column("admission_type_id")] = std::to_string(t);
    base[raw_column("time_in_hospital")] = "4";
    records.push_back(extract_risk_factors(base, counters));
  }
  const auto schema = build_schema(records);
  const auto at = *schema.find("admission_type_id");
  CHECK(schema.cardinality(at) == 9);  // eight observed types plus other
  CHECK(schema[at].values.front() == "1");
  CHECK(schema[at].values.back() == kOtherValue);

  const auto width = onehot_width(schema);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < at; ++f) offset += schema[f].kind == FeatureKind::kNominal ? schema.cardinality(f) : 1;

  const auto x = encode(records[2], schema);
  const auto v = encode_onehot(x, schema);
  REQUIRE(v.size() == width);
  double block = 0;
  for (std::size_t k = 0; k < 9; ++k) block += v[offset + k];
  CHECK(block == 1.0);
  CHECK(v[offset + 2] == 1.0);

  // Each nominal block sums to one; numeric passes through.
  std::size_t pos = 0;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].kind == FeatureKind::kNumeric) {
      if (schema[f].name == "time_in_hospital") CHECK(v[pos] == 4.0);
      ++pos;
      continue;
    }
    double sum = 0;
    for (std::size_t k = 0; k < schema.cardinality(f); ++k) sum += v[pos + k];
    CHECK(sum == 1.0);
    pos += schema.cardinality(f);
  }

  // A type never seen while building the schema maps to the other indicator.
  base[raw_column("admission_type_id")] = "9";
  const auto unseen = encode(extract_risk_factors(base, counters), schema);
  CHECK(static_cast<std::size_t>(unseen.features[at]) == schema.other_code(at));
  const auto u = encode_onehot(unseen, schema);
  CHECK(u.size() == width);
  CHECK(u[offset + 8] == 1.0);
}

TEST_CASE("labels") {
  EncounterVector x;
  x.readmitted = Readmitted::kUnder30;
  CHECK(label(x, Task::kShortTerm));
  CHECK(label(x, Task::kAnyReadmission));
  x.readmitted = Readmitted::kOver30;
  CHECK_FALSE(label(x, Task::kShortTerm));
  CHECK(label(x, Task::kAnyReadmission));
  CHECK_FALSE(label(x, Task::kDifferentiate));
  x.readmitted = Readmitted::kNo;
  CHECK_FALSE(label(x, Task::kShortTerm));
  CHECK_FALSE(label(x, Task::kAnyReadmission));
  CHECK_FALSE(in_task(Readmitted::kNo, Task::kDifferentiate));
}

TEST_CASE("make_split") {
  std::vector<std::int64_t> ids(100);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i * 3 + 1);

  const auto plan = make_split(ids, 7);
  CHECK(plan.train.size() == 75);
  CHECK(plan.test.size() == 25);
  CHECK(plan.seed == 7);

  const auto again = make_split(ids, 7);
  CHECK(again.train == plan.train);
  CHECK(again.test == plan.test);
  CHECK(again.folds == plan.folds);
  CHECK(make_split(ids, 8).train != plan.train);

  std::vector<std::size_t> all(plan.train);
  all.insert(all.end(), plan.test.begin(), plan.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);

  std::vector<std::size_t> tiled;
  for (const auto& f : plan.folds) {
    CHECK(f.size() == 15);
    tiled.insert(tiled.end(), f.begin(), f.end());
  }
  std::sort(tiled.begin(), tiled.end());
  CHECK(tiled == plan.train);

  const auto complement = plan.fold_complement(2);
  CHECK(complement.size() == 60);

  std::vector<std::int64_t> four = {1, 2, 3, 4};
  CHECK_THROWS_AS(make_split(four, 1), DataError);
}

TEST_CASE("make_split is stratified") {
  std::vector<std::int64_t> ids(1000);
  std::vector<std::uint8_t> strata(1000);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = static_cast<std::int64_t>(i);
    strata[i] = i % 10 == 0 ? 0 : (i % 3 == 0 ? 1 : 2);
  }
  const auto plan = make_split(ids, 3, strata);
  CHECK(plan.train.size() == 750);
  std::array<std::size_t, 3> all{}, train{};
  for (std::size_t i = 0; i < ids.size(); ++i) ++all[strata[i]];
  for (const auto i : plan.train) ++train[strata[i]];
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(std::abs(static_cast<double>(train[s]) - 0.75 * static_cast<double>(all[s])) <= 1.0);
  }
  for (const auto& fold : plan.folds) {
    std::size_t rare = 0;
    for (const auto i : fold) rare += strata[i] == 0;
    CHECK(rare >= 14);
    CHECK(rare <= 16);
  }
}

TEST_CASE("preprocess on synthetic data") {
  const auto raw = synthetic(3000, 21);
  const auto p = preprocess(raw, 5);
  const auto& schema = *p.data.schema;
  REQUIRE(schema.size() == 22);
  for (std::size_t f = 0; f < 22; ++f) CHECK(schema[f].name == kRiskFactors[f].name);

  CHECK(p.report.rows_in == 3000);
  CHECK(p.report.rows_out == p.data.rows.size());
  CHECK(p.report.removed_missing_race > 0);
  CHECK(p.report.removed_missing_diagnosis > 0);
  CHECK(p.report.rows_out + p.report.removed_missing_race + p.report.removed_missing_diagnosis >= 3000);
  CHECK(p.split.train.size() + p.split.test.size() == p.data.rows.size());
  CHECK(p.report.class_counts[0] + p.report.class_counts[1] + p.report.class_counts[2] == p.report.rows_out);

  for (const auto& row : p.data.rows) CHECK_NOTHROW(check_conforms(row, schema));
  // Vocabularies come from training rows only.
  const auto race = *schema.find("race");
  CHECK(!schema.exact_code_of(race, "?"));

  const auto again = preprocess(raw, 5);
  CHECK(again.split.train == p.split.train);
  CHECK(schema.fingerprint() == again.data.schema->fingerprint());
}

TEST_CASE("encode_unfiltered keeps every row") {
  const auto raw = synthetic(800, 4);
  const auto d = encode_unfiltered(raw);
  CHECK(d.rows.size() == 800);
  const auto race = *d.schema->find("race");
  CHECK(d.schema->exact_code_of(race, "?"));
}
