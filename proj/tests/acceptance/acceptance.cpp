// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. The offline suite needs no external data; the dataset suite needs
// the public diabetes encounter file (READMIT_DATASET, or data/diabetic_data.csv
// under the source tree).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "readmit/app/commands.hpp"
#include "readmit/cost.hpp"
#include "readmit/eval.hpp"
#include "readmit/models/bayes_net.hpp"
#include "readmit/models/mlp.hpp"
#include "readmit/models/naive_bayes.hpp"
#include "readmit/rng.hpp"
#include "readmit/rules.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace readmit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %s %s: %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("readmit_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Offline suite

std::int64_t brute_force_saved(const std::vector<ScoredLabel>& scored, const CostParams& params, double& threshold) {
  std::set<double> thresholds{0.0};
  double top = 1.0;
  for (const auto& s : scored) {
    thresholds.insert(s.score);
    top = std::max(top, s.score);
  }
  thresholds.insert(std::nextafter(top, 2 * top + 1));
  const std::int64_t a = std::llround(params.alpha * 100);
  const std::int64_t b = std::llround(params.beta * 100);
  std::int64_t best = 0;
  bool first = true;
  for (const double t : thresholds) {
    std::int64_t saved = 0;
    for (const auto& s : scored) {
      if (s.score >= t) saved += s.positive ? a - b : -b;
    }
    if (first || saved > best) {
      best = saved;
      threshold = t;
      first = false;
    }
  }
  return best;
}

Outcome threshold_oracle() {
  Rng rng(6);
  for (int fixture = 0; fixture < 100; ++fixture) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<ScoredLabel> scored;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = fixture % 4 == 0 ? double(rng.below(10)) / 9.0 : rng.uniform();
      scored.push_back({s, rng.uniform() < 0.05 + 0.6 * s});
    }
    scored[0].positive = true;
    scored[1].positive = false;
    const CostParams params{.alpha = 500 + double(rng.below(20000)), .beta = 1 + double(rng.below(499))};
    double want_threshold = 0;
    const auto want = brute_force_saved(scored, params, want_threshold);
    const auto got = optimize_threshold(scored, params);
    if (got.saved_cents != want || got.threshold != want_threshold) {
      return {false, "fixture " + std::to_string(fixture) + " differs from the exhaustive scan"};
    }
  }
  return {true, "100 random fixtures identical to the exhaustive scan"};
}

Outcome apriori_oracle() {
  std::size_t datasets = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Rng rng(seed);
    // Between 2 and 4 nominal features, 2 to 4 real values each, at most 12 items.
    std::vector<FeatureDescriptor> features;
    std::size_t items = 0;
    while (features.size() < 4) {
      const std::size_t k = 2 + rng.below(3);
      if (items + k > 12) break;
      std::vector<std::string> values;
      for (std::size_t v = 0; v < k; ++v) values.push_back("v" + std::to_string(v));
      features.push_back({"f" + std::to_string(features.size()), FeatureKind::kNominal, values, ""});
      items += k;
    }
    Dataset d{std::make_shared<const FeatureSchema>(features), {}};
    const std::size_t rows = 20 + rng.below(150);
    for (std::size_t i = 0; i < rows; ++i) {
      EncounterVector x;
      for (std::size_t f = 0; f < features.size(); ++f) x.features.push_back(double(rng.below(d.schema->cardinality(f))));
      x.readmitted = Readmitted::kNo;
      d.rows.push_back(std::move(x));
    }
    const MiningParams params{.min_support = 1 + rng.below(12), .max_len = 1 + rng.below(4)};

    std::map<std::vector<Item>, std::size_t> want;
    const std::size_t nf = features.size();
    std::vector<std::size_t> choice(nf, 0);
    while (true) {
      std::vector<Item> key;
      for (std::size_t f = 0; f < nf; ++f) {
        if (choice[f] > 0) key.push_back({f, choice[f] - 1});
      }
      if (!key.empty() && key.size() <= params.max_len) {
        std::size_t support = 0;
        for (const auto& x : d.rows) {
          bool all = true;
          for (const auto& it : key) all = all && static_cast<std::size_t>(x.features[it.feature]) == it.code;
          support += all;
        }
        if (support >= params.min_support) want[key] = support;
      }
      std::size_t f = 0;
      for (; f < nf; ++f) {
        if (++choice[f] < d.schema->cardinality(f)) break;
        choice[f] = 0;
      }
      if (f == nf) break;
    }
    std::map<std::vector<Item>, std::size_t> got;
    for (const auto& s : mine_frequent(d, params)) got[s.items] = s.support;
    if (got != want) return {false, "dataset " + std::to_string(seed) + " differs from exhaustive enumeration"};
    ++datasets;
  }
  return {true, std::to_string(datasets) + " random datasets with at most 12 items match exhaustive enumeration"};
}

Outcome gradient_check() {
  Rng rng(17);
  const std::size_t rows = 40, dims = 6, hidden = 3;
  std::vector<double> inputs, targets;
  for (std::size_t i = 0; i < rows * dims; ++i) inputs.push_back(rng.uniform(-2, 2));
  for (std::size_t i = 0; i < rows; ++i) targets.push_back(rng.uniform() < 0.3 ? 1.0 : 0.0);
  const MlpObjective objective(inputs, dims, targets, hidden, 1e-3);
  const double h = 1e-5;
  double worst = 0;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w(objective.parameter_count());
    for (auto& v : w) v = rng.uniform(-1, 1);
    std::vector<double> grad(w.size());
    objective(w, grad);
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto plus = w, minus = w;
      plus[k] += h;
      minus[k] -= h;
      const double fd = (objective.value(plus) - objective.value(minus)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[k]) / std::max({std::abs(fd), std::abs(grad[k]), 1e-6}));
    }
  }
  return {worst < 1e-4, fmt("max relative error %.3g over 10 random points", worst)};
}

Outcome posterior_sums() {
  std::istringstream csv(testing::synthetic_dataset_csv(4000, 5));
  const auto prepared = readmit::preprocess(parse_dataset(csv), 5);
  double worst = 0;
  for (const auto task : {Task::kShortTerm, Task::kAnyReadmission}) {
    const auto labels = task_labels(prepared.data.rows, task);
    const TrainingSet set{*prepared.data.schema, prepared.data.rows, labels};
    const auto nb = NaiveBayes::train(set);
    const auto bn = BayesNet::train(set);
    for (const auto& x : prepared.data.rows) {
      const auto a = nb.posteriors(x);
      const auto b = bn.posteriors(x);
      worst = std::max({worst, std::abs(a[0] + a[1] - 1), std::abs(b[0] + b[1] - 1)});
    }
  }
  return {worst <= 1e-9, fmt("max |P(0)+P(1)-1| = %.3g over two tasks", worst)};
}

Outcome auprc_fixture() {
  const std::vector<ScoredLabel> s{{0.9, true}, {0.8, false}, {0.7, true}, {0.1, false}};
  const double ap = average_precision(s);
  return {std::abs(ap - 0.8333333333333333) < 1e-9, fmt("AUPRC %.12f", ap)};
}

Outcome determinism() {
  const auto dir = scratch_dir("determinism");
  {
    std::ofstream(dir / "data.csv") << testing::synthetic_dataset_csv(2000, 9);
    std::ofstream(dir / "ids.csv") << testing::synthetic_id_mappings_csv();
  }
  auto run = [&](const std::string& out) {
    const std::vector<std::string> args{"readmit", "reproduce", "--seed", "13", "--dataset", (dir / "data.csv").string(),
                                        "--mappings", (dir / "ids.csv").string(), "--out", (dir / out).string(),
                                        "--set", "random_forest.n_trees=20", "--set", "cv.random_forest.n_trees=10,20",
                                        "--set", "adaboost.n_rounds=20", "--set", "cv.adaboost.n_rounds=20",
                                        "--set", "rules.min_support=80"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream log;
    return app::run_cli(static_cast<int>(argv.size()), argv.data(), log, log);
  };
  if (run("a") != 0 || run("b") != 0) return {false, "a seeded reproduce run failed"};
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "run_manifest.json") continue;
    const auto rel = fs::relative(entry.path(), dir / "a");
    if (!fs::exists(dir / "b" / rel) || slurp(entry.path()) != slurp(dir / "b" / rel)) {
      return {false, rel.string() + " differs between runs"};
    }
    ++files;
  }
  fs::remove_all(dir);
  return {files > 0, std::to_string(files) + " report files byte-identical across two runs with seed 13"};
}

void offline_suite() {
  report("6b", "saved cost arithmetic", [] {
    const double saved = saved_cost(ConfusionMatrix{100, 50, 0, 0}, CostParams{10591, 2409});
    return Outcome{saved == 697750.0, fmt("saved_cost(tp=100, fp=50) = %.2f", saved)};
  });
  report("6c", "threshold optimizer vs exhaustive scan", threshold_oracle);
  report("7a", "Apriori vs exhaustive enumeration", apriori_oracle);
  report("7b", "MLP gradient vs central differences", gradient_check);
  report("7c", "naive Bayes and Bayes network posteriors sum to one", posterior_sums);
  report("7d", "AUPRC fixture", auprc_fixture);
  report("7e", "seeded runs are byte-identical", determinism);
}

// ---------------------------------------------------------------------------
// Dataset suite

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double auprc_of(const nlohmann::json& table, std::string_view model) {
  for (const auto& m : table.at("models")) {
    if (m.at("model") == model) return m.at("auprc").get<double>();
  }
  throw std::runtime_error("no AUPRC for " + std::string(model));
}

std::size_t rank_of(const nlohmann::json& ablation, std::string_view feature) {
  const auto& order = ablation.at("by_importance");
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i].at("feature") == feature) return i + 1;
  }
  return 0;
}

const nlohmann::json* find_rule(const nlohmann::json& rules, const std::set<std::pair<std::string, std::string>>& items) {
  for (const auto& r : rules.at("rules")) {
    std::set<std::pair<std::string, std::string>> have;
    for (const auto& it : r.at("items")) have.emplace(it.at("feature").get<std::string>(), it.at("value").get<std::string>());
    if (have == items) return &r;
  }
  return nullptr;
}

void dataset_suite() {
  const char* env = std::getenv("READMIT_DATASET");
  const fs::path dataset = env ? fs::path(env) : fs::path(READMIT_SOURCE_DIR) / "data" / "diabetic_data.csv";
  const std::vector<std::pair<std::string, std::string>> criteria{
      {"1", "preprocessing size, class mix and runtime"},
      {"2", "AUPRC on any readmission"},
      {"3", "AUPRC on short-term readmission"},
      {"4", "ablation rankings"},
      {"5", "class-sensitive rules"},
      {"6a", "random forest saved cost extrapolated"},
      {"8", "full reproduce run under two hours"}};
  if (!fs::exists(dataset)) {
    for (const auto& [id, title] : criteria) {
      report(id, title, [&] { return Outcome{false, "dataset not found at " + dataset.string()}; });
    }
    return;
  }

  app::RunConfig config;
  config.dataset = dataset;
  config.mappings = dataset.parent_path() / "IDs_mapping.csv";
  config.out = scratch_dir("dataset");
  std::ostringstream log;
  app::Pipeline pipeline(config, log);
  const auto total_start = std::chrono::steady_clock::now();

  report("1", criteria[0].second, [&] {
    const auto start = std::chrono::steady_clock::now();
    pipeline.preprocess();
    const double secs = seconds_since(start);
    const auto& r = pipeline.prepared().report;
    const double n = double(r.rows_out);
    std::array<double, 3> share{};
    for (std::size_t c = 0; c < 3; ++c) share[c] = 100.0 * double(r.class_counts[c]) / n;
    const bool size_ok = std::abs(n - 98053) <= 0.01 * 98053;
    const bool mix_ok = std::abs(share[0] - 11) <= 2 && std::abs(share[1] - 35) <= 2 && std::abs(share[2] - 54) <= 2;
    return Outcome{size_ok && mix_ok && secs < 60,
                   fmt("%.0f rows; <30 %.1f%%, >30 %.1f%%, NO %.1f%%", n, share[0], share[1], share[2]) +
                       fmt("; %.1f s", secs)};
  });

  bool trained = false;
  auto train_eval = [&] {
    if (!trained) pipeline.train_eval();
    trained = true;
  };
  report("2", criteria[1].second, [&] {
    train_eval();
    const auto t = read_json(config.out / "auprc_any_readmission.json");
    const double rf = auprc_of(t, "random_forest"), nb = auprc_of(t, "naive_bayes"), bn = auprc_of(t, "bayes_net"),
                 ab = auprc_of(t, "adaboost"), mlp = auprc_of(t, "mlp");
    const bool ordering = std::min(rf, mlp) >= std::max(nb, bn) && std::min(nb, bn) >= ab;
    const bool pass = std::abs(rf - 0.65) <= 0.05 && std::abs(nb - 0.63) <= 0.05 && ordering;
    return Outcome{pass, fmt("RF %.4f, NB %.4f, BN %.4f, AdaBoost %.4f", rf, nb, bn, ab) + fmt(", MLP %.4f", mlp) +
                             (ordering ? "; ordering holds" : "; ordering violated")};
  });
  report("3", criteria[2].second, [&] {
    train_eval();
    const auto t = read_json(config.out / "auprc_short_term.json");
    const double rf = auprc_of(t, "random_forest");
    const double prevalence = t.at("prevalence").get<double>();
    return Outcome{std::abs(rf - 0.242) <= 0.06 && rf > prevalence,
                   fmt("RF %.4f, prevalence %.4f", rf, prevalence)};
  });
  report("4", criteria[3].second, [&] {
    pipeline.ablation();
    const auto high = read_json(config.out / "ablation_high_risk.json");
    const auto diff = read_json(config.out / "ablation_differentiate.json");
    const auto inpatient = rank_of(high, "number_inpatient"), discharge = rank_of(high, "discharge_disposition_id"),
               admission = rank_of(high, "admission_type_id");
    const auto labs = rank_of(diff, "num_lab_procedures"), discharge2 = rank_of(diff, "discharge_disposition_id");
    auto top5 = [](std::size_t r) { return r >= 1 && r <= 5; };
    return Outcome{top5(inpatient) && top5(discharge) && top5(admission) && top5(labs) && top5(discharge2),
                   fmt("high risk ranks: inpatient %.0f, discharge %.0f, admission type %.0f", double(inpatient),
                       double(discharge), double(admission)) +
                       fmt("; differentiate ranks: lab procedures %.0f, discharge %.0f", double(labs),
                           double(discharge2))};
  });
  report("5", criteria[4].second, [&] {
    pipeline.rules();
    const auto rules = read_json(config.out / "rules.json");
    const auto* a = find_rule(rules, {{"discharge_disposition_id", "3"}, {"admission_source_id", "7"}});
    const auto* b = find_rule(rules, {{"A1Cresult", "None"}, {"insulin", "No"}});
    if (!a || !b) return Outcome{false, std::string("not mined: ") + (a ? "" : "{discharge=3, source=7} ") + (b ? "" : "{A1C=None, insulin=No}")};
    const double na = a->at("total_matches").get<double>();
    const double lt = a->at("pct").at("<30").get<double>();
    const double nb = b->at("total_matches").get<double>();
    const bool pass = std::abs(na - 8290) <= 82.9 && std::abs(lt - 15.19) <= 0.5 && std::abs(nb - 39978) <= 399.78;
    return Outcome{pass, fmt("{discharge=3, source=7}: %.0f matches, %.2f%% <30; {A1C=None, insulin=No}: %.0f matches",
                             na, lt, nb)};
  });
  report("6a", criteria[5].second, [&] {
    pipeline.cost();
    const auto cost = read_json(config.out / "cost_report.json");
    for (const auto& m : cost.at("models")) {
      if (m.at("model") != "random_forest") continue;
      const double total = m.at("tuned_on_test").at("extrapolated_total").get<double>();
      const double test = m.at("tuned_on_test").at("saved_cost").get<double>();
      return Outcome{total >= 200e6 && total <= 300e6,
                     fmt("saved $%.3fM on test, $%.2fM extrapolated", test / 1e6, total / 1e6)};
    }
    return Outcome{false, "no random forest entry in the cost report"};
  });
  report("8", criteria[6].second, [&] {
    pipeline.write_manifest("acceptance");
    const double secs = seconds_since(total_start);
    return Outcome{secs < 7200, fmt("all stages in %.0f s", secs)};
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string suite = "all";
  app.add_option("--suite", suite, "offline, dataset or all")->check(CLI::IsMember({"offline", "dataset", "all"}));
  CLI11_PARSE(app, argc, argv);
  if (suite != "dataset") offline_suite();
  if (suite != "offline") dataset_suite();
  return failures == 0 ? 0 : 1;
}
