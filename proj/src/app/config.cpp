#include "readmit/app/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "readmit/csv.hpp"
#include "readmit/error.hpp"

namespace readmit::app {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::string bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  return "config: " + std::string(key) + " = '" + std::string(value) + "': expected " + std::string(expected);
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError(bad_value(key, value, "a non-negative integer"));
  }
  return v;
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) throw UsageError(bad_value(key, value, "a number"));
  return v;
}

std::vector<std::size_t> to_uint_list(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  for (const auto item : split_list(value)) out.push_back(to_uint(key, item));
  if (out.empty()) throw UsageError(bad_value(key, value, "a comma-separated list of integers"));
  return out;
}

std::vector<ModelKind> to_models(std::string_view key, std::string_view value) {
  std::vector<ModelKind> out;
  for (const auto item : split_list(value)) {
    const auto kind = parse_model_kind(item);
    if (!kind) throw UsageError(bad_value(key, item, "a model name"));
    out.push_back(*kind);
  }
  return out;
}

std::vector<Task> to_tasks(std::string_view key, std::string_view value) {
  std::vector<Task> out;
  for (const auto item : split_list(value)) {
    const auto task = parse_task(item);
    if (!task) throw UsageError(bad_value(key, item, "short_term, any_readmission or differentiate"));
    out.push_back(*task);
  }
  if (out.empty()) throw UsageError(bad_value(key, value, "at least one task"));
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& format) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ",";
    out += format(item);
  }
  return out;
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void set_option(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  auto& l = c.learners;
  if (key == "data.dataset") {
    c.dataset = std::string(value);
  } else if (key == "data.mappings") {
    c.mappings = std::string(value);
  } else if (key == "run.out") {
    c.out = std::string(value);
  } else if (key == "run.seed") {
    c.seed = to_uint(key, value);
  } else if (key == "train.tasks") {
    c.tasks = to_tasks(key, value);
  } else if (key == "train.models") {
    c.models = to_models(key, value);
  } else if (key == "naive_bayes.smoothing") {
    l.naive_bayes.smoothing = to_double(key, value);
  } else if (key == "naive_bayes.variance_floor") {
    l.naive_bayes.variance_floor = to_double(key, value);
  } else if (key == "bayes_net.smoothing") {
    l.bayes_net.smoothing = to_double(key, value);
  } else if (key == "bayes_net.numeric_bins") {
    l.bayes_net.numeric_bins = to_uint(key, value);
  } else if (key == "random_forest.n_trees") {
    l.forest.n_trees = to_uint(key, value);
  } else if (key == "random_forest.max_depth") {
    l.forest.max_depth = to_uint(key, value);
  } else if (key == "random_forest.features_per_split") {
    l.forest.features_per_split = to_uint(key, value);
  } else if (key == "random_forest.vote") {
    if (value == "soft") {
      l.forest.vote = ForestVote::kSoft;
    } else if (value == "hard") {
      l.forest.vote = ForestVote::kHard;
    } else {
      throw UsageError(bad_value(key, value, "soft or hard"));
    }
  } else if (key == "adaboost.n_rounds") {
    l.boost.n_rounds = to_uint(key, value);
  } else if (key == "adaboost.weak_tree_depth") {
    l.boost.weak_tree_depth = to_uint(key, value);
  } else if (key == "mlp.hidden_nodes") {
    l.mlp.hidden_nodes = to_uint(key, value);
  } else if (key == "mlp.penalty_weight") {
    l.mlp.penalty_weight = to_double(key, value);
  } else if (key == "mlp.bfgs_max_iters") {
    l.mlp.bfgs_max_iters = to_uint(key, value);
  } else if (key == "mlp.bfgs_tolerance") {
    l.mlp.bfgs_tolerance = to_double(key, value);
  } else if (key == "cv.random_forest.n_trees") {
    c.cv_forest_trees = to_uint_list(key, value);
  } else if (key == "cv.adaboost.n_rounds") {
    c.cv_boost_rounds = to_uint_list(key, value);
  } else if (key == "cv.mlp.hidden_nodes") {
    c.cv_mlp_hidden = to_uint_list(key, value);
  } else if (key == "ablation.tasks") {
    c.ablation_tasks = to_tasks(key, value);
  } else if (key == "ablation.subsample") {
    c.ablation_subsample = to_double(key, value);
    if (!(c.ablation_subsample > 0 && c.ablation_subsample <= 1)) {
      throw UsageError(bad_value(key, value, "a fraction in (0, 1]"));
    }
  } else if (key == "rules.min_support") {
    c.rules.min_support = to_uint(key, value);
  } else if (key == "rules.max_len") {
    c.rules.max_len = to_uint(key, value);
  } else if (key == "rules.classes") {
    c.rule_classes.clear();
    for (const auto item : split_list(value)) {
      const auto cls = parse_rule_class(item);
      if (!cls) throw UsageError(bad_value(key, item, "<30, >30, NO or READMITTED"));
      c.rule_classes.push_back(*cls);
    }
  } else if (key == "cost.alpha") {
    c.cost.alpha = to_double(key, value);
  } else if (key == "cost.beta") {
    c.cost.beta = to_double(key, value);
  } else if (key == "cost.models") {
    c.cost_models = to_models(key, value);
  } else {
    throw UsageError("config: unknown key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  RunConfig config;
  std::size_t line_number = 0;
  while (!text.empty()) {
    ++line_number;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(std::string(source) + ":" + std::to_string(line_number) + ": expected key = value");
    }
    try {
      set_option(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(std::string(source) + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string canonical_text(const RunConfig& c) {
  const auto& l = c.learners;
  auto models = [](const std::vector<ModelKind>& v) {
    return join(v, [](ModelKind k) { return std::string(to_string(k)); });
  };
  auto tasks = [](const std::vector<Task>& v) { return join(v, [](Task t) { return std::string(to_string(t)); }); };
  auto uints = [](const std::vector<std::size_t>& v) { return join(v, [](std::size_t n) { return std::to_string(n); }); };
  std::ostringstream out;
  out << "data.dataset = " << c.dataset.string() << '\n'
      << "data.mappings = " << c.mappings.string() << '\n'
      << "run.seed = " << c.seed << '\n'
      << "train.tasks = " << tasks(c.tasks) << '\n'
      << "train.models = " << models(c.models) << '\n'
      << "naive_bayes.smoothing = " << number(l.naive_bayes.smoothing) << '\n'
      << "naive_bayes.variance_floor = " << number(l.naive_bayes.variance_floor) << '\n'
      << "bayes_net.smoothing = " << number(l.bayes_net.smoothing) << '\n'
      << "bayes_net.numeric_bins = " << l.bayes_net.numeric_bins << '\n'
      << "random_forest.n_trees = " << l.forest.n_trees << '\n'
      << "random_forest.max_depth = " << l.forest.max_depth << '\n'
      << "random_forest.features_per_split = " << l.forest.features_per_split << '\n'
      << "random_forest.vote = " << (l.forest.vote == ForestVote::kSoft ? "soft" : "hard") << '\n'
      << "adaboost.n_rounds = " << l.boost.n_rounds << '\n'
      << "adaboost.weak_tree_depth = " << l.boost.weak_tree_depth << '\n'
      << "mlp.hidden_nodes = " << l.mlp.hidden_nodes << '\n'
      << "mlp.penalty_weight = " << number(l.mlp.penalty_weight) << '\n'
      << "mlp.bfgs_max_iters = " << l.mlp.bfgs_max_iters << '\n'
      << "mlp.bfgs_tolerance = " << number(l.mlp.bfgs_tolerance) << '\n'
      << "cv.random_forest.n_trees = " << uints(c.cv_forest_trees) << '\n'
      << "cv.adaboost.n_rounds = " << uints(c.cv_boost_rounds) << '\n'
      << "cv.mlp.hidden_nodes = " << uints(c.cv_mlp_hidden) << '\n'
      << "ablation.tasks = " << tasks(c.ablation_tasks) << '\n'
      << "ablation.subsample = " << number(c.ablation_subsample) << '\n'
      << "rules.min_support = " << c.rules.min_support << '\n'
      << "rules.max_len = " << c.rules.max_len << '\n'
      << "rules.classes = "
      << join(c.rule_classes, [](RuleClass r) { return std::string(to_string(r)); }) << '\n'
      << "cost.alpha = " << number(c.cost.alpha) << '\n'
      << "cost.beta = " << number(c.cost.beta) << '\n'
      << "cost.models = " << models(c.cost_models) << '\n';
  return out.str();
}

std::string config_hash(const RunConfig& config) { return csv::hex64(csv::fnv1a(canonical_text(config))); }

}  // namespace readmit::app
