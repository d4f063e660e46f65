#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "readmit/dataset.hpp"
#include "readmit/models/random_forest.hpp"

namespace readmit {

struct AblationRow {
  std::string feature;
  double ablated_oob_error = 0;
  /// ablated_oob_error - baseline; negative for features that only add noise.
  double importance = 0;
};

struct AblationReport {
  Task task = Task::kAnyReadmission;
  double baseline_oob_error = 0;
  std::size_t rows_used = 0;
  std::size_t rows_available = 0;
  double subsample = 1.0;
  ForestParams forest;
  /// One row per feature, in schema order.
  std::vector<AblationRow> rows;
};

struct AblationOptions {
  /// Fraction of the task's rows used for every run, drawn once with `subsample_seed`.
  double subsample = 1.0;
  std::uint64_t subsample_seed = 1;
  /// Called after each run with (runs done, total runs).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Trains a baseline forest and one forest per left-out feature, all with the same
/// parameters and seed, and records the out-of-bag error of each.
AblationReport ablation_study(const Dataset& data, Task task, const ForestParams& forest,
                              const AblationOptions& options = {});

/// Rows by descending importance; ties keep schema order.
std::vector<AblationRow> sorted_by_importance(const AblationReport& report);

/// 1-based rank of `feature` in sorted_by_importance, 0 if absent.
std::size_t importance_rank(const AblationReport& report, std::string_view feature);

std::string ablation_csv(std::span<const AblationRow> rows, double baseline);
nlohmann::json to_json(const AblationReport& report);

}  // namespace readmit
