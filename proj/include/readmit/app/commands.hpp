#pragma once

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <utility>

#include "readmit/app/config.hpp"
#include "readmit/app/reports.hpp"
#include "readmit/feature_analysis.hpp"
#include "readmit/ingest.hpp"
#include "readmit/preprocess.hpp"

namespace readmit::app {

struct FittedModel {
  CvResult cv;
  ModelConfig selected;
  std::unique_ptr<Scorer> model;
};

/// One run over one configuration. Loads and preprocesses lazily and caches
/// fitted models, so a full reproduction fits each model once.
class Pipeline {
 public:
  Pipeline(RunConfig config, std::ostream& log);

  const RunConfig& config() const { return config_; }
  ReportWriter& writer() { return writer_; }

  const DatasetLoad& raw();
  const PreparedData& prepared();

  /// Rows of the training or test part that take part in `task`.
  std::vector<EncounterVector> train_rows(Task task);
  std::vector<EncounterVector> test_rows(Task task);

  /// Cross-validated and refit on the full training part.
  const FittedModel& fitted(Task task, ModelKind kind);

  void preprocess();
  void train_eval();
  void ablation();
  void rules();
  void cost();
  void reproduce();

  /// Writes run_manifest.json (the only output carrying wall-clock data).
  void write_manifest(std::string_view command);

 private:
  std::vector<ModelConfig> candidates(ModelKind kind) const;

  RunConfig config_;
  std::ostream& log_;
  ReportWriter writer_;
  std::optional<DatasetLoad> raw_;
  std::optional<PreparedData> prepared_;
  std::map<std::pair<Task, ModelKind>, FittedModel> fitted_;
};

/// Entry point of the command-line tool. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace readmit::app
