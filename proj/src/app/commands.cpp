#include "readmit/app/commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>

#include <CLI11.hpp>

#include "readmit/cost.hpp"
#include "readmit/csv.hpp"
#include "readmit/error.hpp"
#include "readmit/eval.hpp"
#include "readmit/models/model_io.hpp"
#include "readmit/rules.hpp"

namespace readmit::app {

namespace {

std::string task_file_name(Task task) {
  return task == Task::kAnyReadmission ? "any_readmission" : std::string(to_string(task));
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string encoded_dataset_csv(const PreparedData& p) {
  const auto& schema = *p.data.schema;
  std::vector<std::string> split(p.data.rows.size(), "test");
  std::vector<std::string> fold(p.data.rows.size(), "");
  for (const auto i : p.split.train) split[i] = "train";
  for (std::size_t k = 0; k < kFoldCount; ++k) {
    for (const auto i : p.split.folds[k]) fold[i] = std::to_string(k);
  }
  std::vector<std::string> fields{"encounter_id", "split", "fold"};
  for (const auto& d : schema.features()) fields.push_back(d.name);
  fields.emplace_back("readmitted");
  std::string out = csv::join_record(fields) + "\n";
  for (std::size_t i = 0; i < p.data.rows.size(); ++i) {
    const auto& row = p.data.rows[i];
    fields = {std::to_string(row.encounter_id), split[i], fold[i]};
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const double v = row.features[f];
      fields.push_back(schema[f].kind == FeatureKind::kNominal ? schema[f].values[static_cast<std::size_t>(v)]
                                                               : format_number(v));
    }
    fields.emplace_back(to_string(row.readmitted));
    out += csv::join_record(fields) + "\n";
  }
  return out;
}

std::vector<EncounterVector> gather(const Dataset& data, std::span<const std::size_t> positions, Task task) {
  std::vector<EncounterVector> rows;
  for (const auto p : positions) {
    if (in_task(data.rows[p].readmitted, task)) rows.push_back(data.rows[p]);
  }
  return rows;
}

nlohmann::json candidate_json(const CvCandidate& c) {
  return {{"model", to_string(c.config.kind)},
          {"size", c.config.size()},
          {"fold_auprc", c.fold_auprc},
          {"mean_auprc", c.mean_auprc}};
}

/// Adds the mapping-file description to admission and discharge ID items.
void describe_item(std::span<const IdMapping> mappings, nlohmann::json& item) {
  const auto table = parse_id_table(item.at("feature").get<std::string>());
  if (!table) return;
  const auto value = item.at("value").get<std::string>();
  int id = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), id);
  if (ec != std::errc() || ptr != value.data() + value.size()) return;
  if (const auto text = describe_id(mappings, *table, id)) item["description"] = *text;
}

}  // namespace

Pipeline::Pipeline(RunConfig config, std::ostream& log)
    : config_(std::move(config)), log_(log), writer_(config_.out, Provenance{config_hash(config_), config_.seed}) {}

const DatasetLoad& Pipeline::raw() {
  if (!raw_) {
    log_ << "loading " << config_.dataset.string() << "\n";
    raw_ = load_dataset(config_.dataset);
    log_ << "  " << raw_->rows.size() << " encounters\n";
  }
  return *raw_;
}

const PreparedData& Pipeline::prepared() {
  if (!prepared_) {
    prepared_ = readmit::preprocess(raw(), config_.seed);
    log_ << "  " << prepared_->report.rows_out << " encounters after filtering (" << prepared_->split.train.size()
         << " train, " << prepared_->split.test.size() << " test)\n";
  }
  return *prepared_;
}

std::vector<EncounterVector> Pipeline::train_rows(Task task) {
  const auto& p = prepared();
  return gather(p.data, p.split.train, task);
}

std::vector<EncounterVector> Pipeline::test_rows(Task task) {
  const auto& p = prepared();
  return gather(p.data, p.split.test, task);
}

std::vector<ModelConfig> Pipeline::candidates(ModelKind kind) const {
  ModelConfig base = config_.learners.with_seed(config_.seed);
  base.kind = kind;
  std::vector<ModelConfig> out;
  switch (kind) {
    case ModelKind::kRandomForest:
      for (const auto n : config_.cv_forest_trees) {
        out.push_back(base);
        out.back().forest.n_trees = n;
      }
      break;
    case ModelKind::kAdaBoost:
      for (const auto n : config_.cv_boost_rounds) {
        out.push_back(base);
        out.back().boost.n_rounds = n;
      }
      break;
    case ModelKind::kMlp:
      for (const auto n : config_.cv_mlp_hidden) {
        out.push_back(base);
        out.back().mlp.hidden_nodes = n;
      }
      break;
    default: out.push_back(base);
  }
  return out;
}

const FittedModel& Pipeline::fitted(Task task, ModelKind kind) {
  const auto key = std::pair(task, kind);
  if (const auto it = fitted_.find(key); it != fitted_.end()) return it->second;
  const auto& p = prepared();
  const auto cands = candidates(kind);
  log_ << "  " << to_string(kind) << " [" << to_string(task) << "]: cross-validating " << cands.size()
       << " configuration(s)\n";
  FittedModel fm;
  fm.cv = cross_validate(cands, p.data, p.split, task);
  fm.selected = fm.cv.candidates[fm.cv.selected].config;
  const auto rows = train_rows(task);
  const auto labels = task_labels(rows, task);
  fm.model = train_model(fm.selected, TrainingSet{*p.data.schema, rows, labels});
  return fitted_.emplace(key, std::move(fm)).first->second;
}

void Pipeline::preprocess() {
  log_ << "preprocess\n";
  const auto& p = prepared();
  auto report = to_json(p.report);
  report["schema_fingerprint"] = p.data.schema->fingerprint();
  report["onehot_width"] = onehot_width(*p.data.schema);
  writer_.json("preprocess_report.json", {{"preprocess", std::move(report)}});
  writer_.json("schema.json", {{"schema", to_json(*p.data.schema)}});
  writer_.raw("encoded_dataset.csv", encoded_dataset_csv(p));
}

void Pipeline::train_eval() {
  log_ << "train-eval\n";
  for (const auto task : config_.tasks) {
    const auto name = task_file_name(task);
    const auto test = test_rows(task);
    const auto labels = task_labels(test, task);
    nlohmann::json table = nlohmann::json::array();
    nlohmann::json cv = nlohmann::json::array();
    std::string table_csv = "model,auprc,cv_mean_auprc,prevalence\n";
    double prevalence = 0;
    for (const auto kind : config_.models) {
      const auto& fm = fitted(task, kind);
      const auto scores = score_rows(*fm.model, test);
      const auto curve = pr_curve(pair_scores(scores, labels));
      prevalence = curve.prevalence();
      const auto model_name = std::string(to_string(kind));
      writer_.csv("pr_" + name + "_" + model_name + ".csv", to_csv(curve));
      auto summary = summary_json(curve);
      summary["model"] = model_name;
      summary["task"] = to_string(task);
      writer_.json("pr_" + name + "_" + model_name + ".json", std::move(summary));
      writer_.raw("models/" + name + "_" + model_name + ".json", model_to_json(*fm.model).dump() + "\n");

      const auto& chosen = fm.cv.candidates[fm.cv.selected];
      table.push_back({{"model", model_name},
                       {"auprc", curve.area},
                       {"cv_mean_auprc", chosen.mean_auprc},
                       {"size", fm.selected.size()}});
      table_csv += model_name + "," + format_number(curve.area) + "," + format_number(chosen.mean_auprc) + "," +
                   format_number(curve.prevalence()) + "\n";
      nlohmann::json cands = nlohmann::json::array();
      for (const auto& c : fm.cv.candidates) cands.push_back(candidate_json(c));
      cv.push_back({{"model", model_name}, {"selected", fm.cv.selected}, {"candidates", std::move(cands)}});
      log_ << "  " << model_name << " [" << to_string(task) << "] AUPRC " << format_number(curve.area) << "\n";
    }
    writer_.csv("auprc_" + name + ".csv", table_csv);
    writer_.json("auprc_" + name + ".json", {{"task", to_string(task)},
                                             {"test_rows", test.size()},
                                             {"train_rows", train_rows(task).size()},
                                             {"prevalence", prevalence},
                                             {"models", std::move(table)}});
    writer_.json("cv_" + name + ".json", {{"task", to_string(task)}, {"folds", kFoldCount}, {"models", std::move(cv)}});
  }
}

void Pipeline::ablation() {
  log_ << "ablation\n";
  const auto& p = prepared();
  const auto train = select_rows(p.data, p.split.train);
  const auto forest = config_.learners.with_seed(config_.seed).forest;
  for (const auto task : config_.ablation_tasks) {
    AblationOptions options;
    options.subsample = config_.ablation_subsample;
    options.subsample_seed = derive_seed(config_.seed, 0xab1a7e);
    options.progress = [&](std::size_t done, std::size_t total) {
      if (done == total || done % 6 == 0) log_ << "  " << to_string(task) << ": " << done << "/" << total << " forests\n";
    };
    const auto report = ablation_study(train, task, forest, options);
    const std::string name = task == Task::kAnyReadmission ? "high_risk" : std::string(to_string(task));
    writer_.csv("ablation_" + name + ".csv", ablation_csv(report.rows, report.baseline_oob_error));
    const auto sorted = sorted_by_importance(report);
    writer_.csv("ablation_" + name + "_sorted.csv", ablation_csv(sorted, report.baseline_oob_error));
    writer_.json("ablation_" + name + ".json", to_json(report));
  }
}

void Pipeline::rules() {
  log_ << "rules\n";
  const auto data = encode_unfiltered(raw());
  std::vector<std::vector<ItemSet>> mined;
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto cls : config_.rule_classes) {
    mined.push_back(mine_class_sensitive(data, cls, config_.rules));
    per_class.push_back({{"class", to_string(cls)}, {"frequent_itemsets", mined.back().size()}});
    log_ << "  " << to_string(cls) << ": " << mined.back().size() << " frequent itemsets\n";
  }
  const auto merged = merge_itemsets(mined);
  const auto stats = class_stats(merged, data);
  writer_.csv("rules.csv", rules_csv(*data.schema, stats));
  auto rules = rules_json(*data.schema, stats, data.rows.size());
  if (std::filesystem::exists(config_.mappings)) {
    const auto mappings = load_id_mappings(config_.mappings);
    for (auto& rule : rules) {
      for (auto& item : rule.at("items")) describe_item(mappings, item);
    }
  } else {
    log_ << "  no ID mapping file at " << config_.mappings.string() << "; rules carry raw IDs only\n";
  }
  writer_.json("rules.json", {{"population", data.rows.size()},
                              {"min_support", config_.rules.min_support},
                              {"max_len", config_.rules.max_len},
                              {"mined", std::move(per_class)},
                              {"rules", std::move(rules)}});
}

void Pipeline::cost() {
  log_ << "cost\n";
  const auto& p = prepared();
  const Task task = Task::kAnyReadmission;
  const auto& params = config_.cost;
  validate(params);
  const auto test = test_rows(task);
  const auto test_labels = task_labels(test, task);
  const auto n_total = p.data.rows.size();
  const auto tune_rows = gather(p.data, p.split.folds[0], task);
  const auto tune_labels = task_labels(tune_rows, task);
  const auto fit_rows = gather(p.data, p.split.fold_complement(0), task);
  const auto fit_labels = task_labels(fit_rows, task);

  nlohmann::json models = nlohmann::json::array();
  for (const auto kind : config_.cost_models) {
    const auto& fm = fitted(task, kind);
    const auto scored = pair_scores(score_rows(*fm.model, test), test_labels);
    const auto on_test = optimize_threshold(scored, params);
    auto on_test_json = to_json(on_test);
    on_test_json["extrapolated_total"] = extrapolate_total(on_test.saved(), test.size(), n_total);

    // Threshold chosen on a validation fold the model never saw, then applied to test.
    const auto held_model = train_model(fm.selected, TrainingSet{*p.data.schema, fit_rows, fit_labels});
    const auto tuned = optimize_threshold(pair_scores(score_rows(*held_model, tune_rows), tune_labels), params);
    const auto honest = apply_threshold(pair_scores(score_rows(*held_model, test), test_labels),
                                        tuned.threshold, params);
    auto honest_json = to_json(honest);
    honest_json["extrapolated_total"] = extrapolate_total(honest.saved(), test.size(), n_total);
    honest_json["validation"] = to_json(tuned);

    models.push_back({{"model", to_string(kind)}, {"tuned_on_test", std::move(on_test_json)},
                      {"tuned_on_validation", std::move(honest_json)}});
    log_ << "  " << to_string(kind) << ": saved $" << format_number(on_test.saved()) << " on test, threshold "
         << format_number(on_test.threshold) << "\n";
  }
  const auto s = saved_cost_matrix(params);
  writer_.json("cost_report.json",
               {{"task", to_string(task)},
                {"alpha", params.alpha},
                {"beta", params.beta},
                {"beta_from_mean_stay", derive_beta(params.alpha, p.report.mean_time_in_hospital)},
                {"mean_time_in_hospital", p.report.mean_time_in_hospital},
                {"saved_cost_matrix",
                 {{"tp", to_dollars(s.tp_cents)}, {"fp", to_dollars(s.fp_cents)}, {"fn", to_dollars(s.fn_cents)},
                  {"tn", to_dollars(s.tn_cents)}}},
                {"test_rows", test.size()},
                {"total_rows", n_total},
                {"models", std::move(models)}});
}

void Pipeline::reproduce() {
  preprocess();
  train_eval();
  ablation();
  rules();
  cost();
}

void Pipeline::write_manifest(std::string_view command) {
  nlohmann::json files = writer_.written();
  nlohmann::json manifest = {{"command", command},
                             {"finished_utc", utc_timestamp()},
                             {"config_hash", writer_.provenance().config_hash},
                             {"seed", writer_.provenance().seed},
                             {"config", canonical_text(config_)},
                             {"files", std::move(files)}};
  write_file(writer_.dir() / "run_manifest.json", manifest.dump(2) + "\n");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Readmission risk pipeline"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir, model, task, dataset, mappings;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "seed for splits and learners");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--model", model, "restrict to one model (naive_bayes, bayes_net, random_forest, adaboost, mlp)");
  app.add_option("--task", task, "restrict to one task (short_term, any_readmission, differentiate)");
  app.add_option("--dataset", dataset, "path to diabetic_data.csv");
  app.add_option("--mappings", mappings, "path to IDs_mapping.csv");
  app.add_option("--set", overrides, "override a config key, e.g. --set random_forest.n_trees=50");
  app.fallthrough();

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"preprocess", "filter, encode and split; write the preprocessing report"},
      {"train-eval", "cross-validate, fit and evaluate the models; write PR curves and AUPRC tables"},
      {"ablation", "leave-one-feature-out forest importance"},
      {"rules", "class-sensitive frequent itemsets"},
      {"cost", "saved-cost threshold optimization"},
      {"reproduce", "all of the above into one directory"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + o + "'");
      set_option(config, o.substr(0, eq), o.substr(eq + 1));
    }
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out = out_dir;
    if (!dataset.empty()) config.dataset = dataset;
    if (!mappings.empty()) config.mappings = mappings;
    if (!model.empty()) {
      const auto kind = parse_model_kind(model);
      if (!kind) throw UsageError("unknown model '" + model + "'");
      config.models = {*kind};
      config.cost_models = {*kind};
    }
    if (!task.empty()) {
      const auto t = parse_task(task);
      if (!t) throw UsageError("unknown task '" + task + "'");
      config.tasks = {*t};
      if (*t != Task::kShortTerm) config.ablation_tasks = {*t};
    }

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Pipeline pipeline(config, err);
    if (name == "preprocess") {
      pipeline.preprocess();
    } else if (name == "train-eval") {
      pipeline.train_eval();
    } else if (name == "ablation") {
      pipeline.ablation();
    } else if (name == "rules") {
      pipeline.rules();
    } else if (name == "cost") {
      pipeline.cost();
    } else {
      pipeline.reproduce();
    }
    pipeline.write_manifest(name);
    out << "wrote " << pipeline.writer().written().size() << " files to " << config.out.string() << "\n";
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace readmit::app
