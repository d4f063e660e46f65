#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "readmit/cost.hpp"
#include "readmit/models/training.hpp"
#include "readmit/rules.hpp"

namespace readmit::app {

/// Everything that controls a run. Loaded from a flat `section.key = value` file;
/// keys absent from the file keep the defaults below.
struct RunConfig {
  std::filesystem::path dataset = "data/diabetic_data.csv";
  std::filesystem::path mappings = "data/IDs_mapping.csv";
  std::filesystem::path out = "out";
  std::uint64_t seed = 42;
  /// Tasks evaluated by train-eval.
  std::vector<Task> tasks = {Task::kShortTerm, Task::kAnyReadmission};
  std::vector<ModelKind> models = {kAllModelKinds.begin(), kAllModelKinds.end()};

  /// Hyperparameters of every learner; seeds are replaced by `seed`.
  ModelConfig learners;
  /// Cross-validation grids. A grid with a single value skips the search.
  std::vector<std::size_t> cv_forest_trees = {50, 250};
  std::vector<std::size_t> cv_boost_rounds = {100};
  std::vector<std::size_t> cv_mlp_hidden = {2};

  std::vector<Task> ablation_tasks = {Task::kAnyReadmission, Task::kDifferentiate};
  double ablation_subsample = 1.0;

  MiningParams rules;
  std::vector<RuleClass> rule_classes = {RuleClass::kReadmitted, RuleClass::kNo};

  CostParams cost;
  std::vector<ModelKind> cost_models = {kAllModelKinds.begin(), kAllModelKinds.end()};
};

/// Throws UsageError naming the line for unknown keys or bad values.
RunConfig parse_config(std::string_view text, std::string_view source);
RunConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` setting.
void set_option(RunConfig& config, std::string_view key, std::string_view value);

/// Canonical `key = value` listing of every setting that affects results (the
/// output directory is left out). Loading it back yields the same config.
std::string canonical_text(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace readmit::app
