#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* path = std::getenv("READMIT_CLI");
  REQUIRE_MESSAGE(path != nullptr, "READMIT_CLI must point at the readmit binary");
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args, const fs::path& log) {
  const std::string command = cli() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Workspace {
  fs::path dir;

  Workspace() {
    dir = fs::temp_directory_path() / ("readmit_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "data.csv") << readmit::testing::synthetic_dataset_csv(1500, 3);
    std::ofstream(dir / "ids.csv") << readmit::testing::synthetic_id_mappings_csv();
    std::ofstream(dir / "small.conf") << "# small settings for tests\n"
                                         "random_forest.n_trees = 10\n"
                                         "cv.random_forest.n_trees = 5, 10\n"
                                         "adaboost.n_rounds = 10\n"
                                         "cv.adaboost.n_rounds = 10\n"
                                         "mlp.bfgs_max_iters = 20\n"
                                         "rules.min_support = 60\n"
                                         "rules.max_len = 3\n";
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string common(const fs::path& out) const {
    return "--config " + (dir / "small.conf").string() + " --dataset " + (dir / "data.csv").string() +
           " --mappings " + (dir / "ids.csv").string() + " --out " + out.string();
  }
};

}  // namespace

TEST_CASE("exit codes") {
  Workspace w;
  const auto log = w.dir / "log.txt";
  CHECK(run("--help", log) == 0);
  CHECK(run("", log) == 1);
  CHECK(run("frobnicate", log) == 1);
  CHECK(run("preprocess --model svm " + w.common(w.dir / "o"), log) == 1);
  CHECK(run("preprocess --set no.such.key=1 " + w.common(w.dir / "o"), log) == 1);
  CHECK(run("preprocess --dataset " + (w.dir / "missing.csv").string() + " --out " + (w.dir / "o").string(), log) == 2);
  CHECK(slurp(log).find("missing.csv") != std::string::npos);

  std::ofstream(w.dir / "bad.csv") << "encounter_id,patient_nbr\n1,2\n";
  CHECK(run("preprocess --dataset " + (w.dir / "bad.csv").string() + " --out " + (w.dir / "o").string(), log) == 2);

  std::ofstream(w.dir / "bad.conf") << "random_forest.n_trees = many\n";
  CHECK(run("preprocess --config " + (w.dir / "bad.conf").string(), log) == 1);
  CHECK(slurp(log).find("bad.conf:1") != std::string::npos);
}

TEST_CASE("preprocess writes provenance-stamped reports") {
  Workspace w;
  const auto out = w.dir / "out";
  REQUIRE(run("preprocess --seed 5 " + w.common(out), w.dir / "log.txt") == 0);
  const auto report = nlohmann::json::parse(slurp(out / "preprocess_report.json"));
  CHECK(report.at("seed") == 5);
  CHECK(report.at("config_hash").get<std::string>().size() > 0);
  CHECK(report.at("preprocess").at("rows_in") == 1500);
  const auto encoded = slurp(out / "encoded_dataset.csv");
  CHECK(encoded.rfind("encounter_id,split,fold,", 0) == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "run_manifest.json"));
  CHECK(manifest.at("command") == "preprocess");
  CHECK(manifest.at("config_hash") == report.at("config_hash"));
}

TEST_CASE("a full run is reproducible byte for byte") {
  Workspace w;
  const auto a = w.dir / "a";
  const auto b = w.dir / "b";
  REQUIRE(run("reproduce --seed 11 " + w.common(a), w.dir / "log_a.txt") == 0);
  REQUIRE(run("reproduce --seed 11 " + w.common(b), w.dir / "log_b.txt") == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().filename() == "run_manifest.json") continue;
    const auto rel = fs::relative(entry.path(), a);
    CAPTURE(rel.string());
    REQUIRE(fs::exists(b / rel));
    CHECK(slurp(entry.path()) == slurp(b / rel));
    ++compared;
  }
  CHECK(compared > 30);

  for (const auto* name : {"auprc_short_term.json", "cost_report.json", "rules.json", "ablation_high_risk.json"}) {
    CAPTURE(name);
    const auto j = nlohmann::json::parse(slurp(a / name));
    CHECK(j.at("seed") == 11);
    CHECK(j.contains("config_hash"));
  }
  CHECK(slurp(a / "rules.csv").rfind("# config_hash=", 0) == 0);
  const auto cost = nlohmann::json::parse(slurp(a / "cost_report.json"));
  CHECK(cost.at("models").size() == 5);
}

TEST_CASE("model and task filters, and a different seed changes results") {
  Workspace w;
  const auto a = w.dir / "a";
  const auto c = w.dir / "c";
  REQUIRE(run("train-eval --model naive_bayes --task short_term --seed 1 " + w.common(a), w.dir / "log.txt") == 0);
  REQUIRE(run("train-eval --model naive_bayes --task short_term --seed 2 " + w.common(c), w.dir / "log.txt") == 0);
  CHECK(fs::exists(a / "pr_short_term_naive_bayes.csv"));
  CHECK(!fs::exists(a / "pr_short_term_random_forest.csv"));
  CHECK(!fs::exists(a / "auprc_any_readmission.json"));
  CHECK(slurp(a / "auprc_short_term.csv") != slurp(c / "auprc_short_term.csv"));
}
