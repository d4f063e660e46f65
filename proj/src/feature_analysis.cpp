#include "readmit/feature_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit {

namespace {

double oob_for(const Dataset& data, Task task, const ForestParams& params) {
  const auto labels = task_labels(data.rows, task);
  const TrainingSet train{*data.schema, data.rows, labels};
  const auto forest = RandomForest::train(train, params);
  return oob_error(forest, train).error;
}

std::string task_name(Task task) {
  return task == Task::kAnyReadmission ? "high_risk" : std::string(to_string(task));
}

}  // namespace

AblationReport ablation_study(const Dataset& data, Task task, const ForestParams& forest,
                              const AblationOptions& options) {
  if (!(options.subsample > 0 && options.subsample <= 1)) {
    throw UsageError("ablation: subsample must be in (0, 1]");
  }
  if (data.schema->size() < 2) throw DataError("ablation: need at least two features to leave one out");

  Dataset task_data = restrict_to_task(data, task);
  AblationReport report;
  report.task = task;
  report.forest = forest;
  report.subsample = options.subsample;
  report.rows_available = task_data.rows.size();
  if (options.subsample < 1) {
    std::vector<std::size_t> positions(task_data.rows.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    Rng rng(options.subsample_seed);
    rng.shuffle(std::span(positions));
    const auto keep = static_cast<std::size_t>(std::llround(options.subsample * static_cast<double>(positions.size())));
    positions.resize(keep);
    std::sort(positions.begin(), positions.end());
    task_data = select_rows(task_data, positions);
  }
  report.rows_used = task_data.rows.size();

  const std::size_t n_features = task_data.schema->size();
  const std::size_t total_runs = n_features + 1;
  report.baseline_oob_error = oob_for(task_data, task, forest);
  if (options.progress) options.progress(1, total_runs);
  for (std::size_t f = 0; f < n_features; ++f) {
    const double ablated = oob_for(drop_feature(task_data, f), task, forest);
    report.rows.push_back({(*task_data.schema)[f].name, ablated, ablated - report.baseline_oob_error});
    if (options.progress) options.progress(f + 2, total_runs);
  }
  return report;
}

std::vector<AblationRow> sorted_by_importance(const AblationReport& report) {
  auto rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const AblationRow& a, const AblationRow& b) { return a.importance > b.importance; });
  return rows;
}

std::size_t importance_rank(const AblationReport& report, std::string_view feature) {
  const auto rows = sorted_by_importance(report);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].feature == feature) return i + 1;
  }
  return 0;
}

std::string ablation_csv(std::span<const AblationRow> rows, double baseline) {
  std::string out = "feature,baseline_oob_error,ablated_oob_error,importance\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", baseline, r.ablated_oob_error, r.importance);
    out += csv::escape_field(r.feature);
    out += buf;
  }
  return out;
}

nlohmann::json to_json(const AblationReport& report) {
  auto row_json = [](const AblationRow& r) {
    return nlohmann::json{
        {"feature", r.feature}, {"ablated_oob_error", r.ablated_oob_error}, {"importance", r.importance}};
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  nlohmann::json sorted = nlohmann::json::array();
  for (const auto& r : sorted_by_importance(report)) sorted.push_back(row_json(r));
  return {{"task", task_name(report.task)},
          {"baseline_oob_error", report.baseline_oob_error},
          {"rows_available", report.rows_available},
          {"rows_used", report.rows_used},
          {"subsample", report.subsample},
          {"forest",
           {{"n_trees", report.forest.n_trees},
            {"max_depth", report.forest.max_depth},
            {"features_per_split", report.forest.features_per_split},
            {"seed", report.forest.seed}}},
          {"features", std::move(rows)},
          {"by_importance", std::move(sorted)}};
}

}  // namespace readmit
