#include "readmit/models/bayes_net.hpp"

#include <algorithm>
#include <cmath>

#include "readmit/error.hpp"

namespace readmit {

double conditional_mutual_information(std::span<const std::uint32_t> a, std::size_t arity_a,
                                      std::span<const std::uint32_t> b, std::size_t arity_b,
                                      std::span<const std::uint8_t> labels) {
  const std::size_t n = labels.size();
  std::vector<double> joint(2 * arity_a * arity_b, 0.0);
  std::vector<double> marg_a(2 * arity_a, 0.0);
  std::vector<double> marg_b(2 * arity_b, 0.0);
  std::array<double, 2> class_count{};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = labels[i];
    joint[(c * arity_a + a[i]) * arity_b + b[i]] += 1;
    marg_a[c * arity_a + a[i]] += 1;
    marg_b[c * arity_b + b[i]] += 1;
    class_count[c] += 1;
  }
  double info = 0;
  for (int c = 0; c < 2; ++c) {
    if (class_count[c] == 0) continue;
    for (std::size_t x = 0; x < arity_a; ++x) {
      for (std::size_t y = 0; y < arity_b; ++y) {
        const double nxy = joint[(c * arity_a + x) * arity_b + y];
        if (nxy == 0) continue;
        // P(x,y,c) log[ P(x,y|c) / (P(x|c) P(y|c)) ]
        info += nxy / static_cast<double>(n) *
                std::log(nxy * class_count[c] / (marg_a[c * arity_a + x] * marg_b[c * arity_b + y]));
      }
    }
  }
  return std::max(info, 0.0);
}

std::vector<double> equal_frequency_cutpoints(std::vector<double> values, std::size_t bins) {
  std::vector<double> cuts;
  if (values.empty() || bins < 2) return cuts;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  for (std::size_t k = 1; k < bins; ++k) {
    const std::size_t idx = (k * n + bins - 1) / bins - 1;  // ceil(k n / bins) - 1
    const double c = values[idx];
    if (c < values.back() && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
  }
  return cuts;
}

std::vector<std::optional<std::size_t>> maximum_spanning_forest(
    const std::vector<std::vector<double>>& weights, double min_weight) {
  const std::size_t n = weights.size();
  std::vector<std::optional<std::size_t>> parent(n);
  std::vector<bool> in_tree(n, false);
  for (std::size_t root = 0; root < n; ++root) {
    if (in_tree[root]) continue;
    in_tree[root] = true;
    std::vector<std::size_t> members{root};
    // Prim's algorithm restricted to edges above the threshold.
    while (true) {
      double best = min_weight;
      std::optional<std::pair<std::size_t, std::size_t>> edge;
      for (const auto u : members) {
        for (std::size_t v = 0; v < n; ++v) {
          if (in_tree[v]) continue;
          // members is sorted, so the first maximum seen is the lowest (u, v).
          if (weights[u][v] > best) {
            best = weights[u][v];
            edge = std::pair(u, v);
          }
        }
      }
      if (!edge) break;
      parent[edge->second] = edge->first;
      in_tree[edge->second] = true;
      members.push_back(edge->second);
      std::sort(members.begin(), members.end());
    }
  }
  return parent;
}

std::size_t BayesNet::state(const EncounterVector& x, std::size_t f) const {
  const double v = x.features[f];
  if (schema_shape().cardinalities[f] > 0) return static_cast<std::size_t>(v);
  const auto& cuts = cutpoints_[f];
  return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

std::size_t BayesNet::cpt_index(std::size_t f, int c, std::size_t parent_state, std::size_t s) const {
  const std::size_t parent_arity = parents_[f] ? arity_[*parents_[f]] : 1;
  return (static_cast<std::size_t>(c) * parent_arity + parent_state) * arity_[f] + s;
}

BayesNet BayesNet::train(const TrainingSet& train, const BayesNetParams& params) {
  require_both_classes(train, "Bayes network");
  if (params.smoothing < 0 || params.numeric_bins < 1) {
    throw UsageError("Bayes network: smoothing must be >= 0 and numeric_bins >= 1");
  }
  BayesNet model(SchemaShape::of(train.schema));
  model.params_ = params;
  const auto& cards = model.schema_shape().cardinalities;
  const std::size_t n_features = cards.size();
  const std::size_t n = train.size();

  model.cutpoints_.assign(n_features, {});
  model.arity_.assign(n_features, 0);
  for (std::size_t f = 0; f < n_features; ++f) {
    if (cards[f] > 0) {
      model.arity_[f] = cards[f];
    } else {
      std::vector<double> values;
      values.reserve(n);
      for (const auto& row : train.rows) values.push_back(row.features[f]);
      model.cutpoints_[f] = equal_frequency_cutpoints(std::move(values), params.numeric_bins);
      model.arity_[f] = model.cutpoints_[f].size() + 1;
    }
  }

  std::vector<std::vector<std::uint32_t>> states(n_features, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t i = 0; i < n; ++i) states[f][i] = static_cast<std::uint32_t>(model.state(train.rows[i], f));
  }

  std::vector<std::vector<double>> weights(n_features, std::vector<double>(n_features, 0.0));
  for (std::size_t i = 0; i < n_features; ++i) {
    for (std::size_t j = i + 1; j < n_features; ++j) {
      weights[i][j] = weights[j][i] = conditional_mutual_information(states[i], model.arity_[i], states[j],
                                                                     model.arity_[j], train.labels);
    }
  }
  model.parents_ = maximum_spanning_forest(weights, params.min_edge_information);

  std::array<double, 2> class_count{};
  for (const auto y : train.labels) class_count[y] += 1;
  for (int c = 0; c < 2; ++c) model.log_prior_[c] = std::log(class_count[c] / static_cast<double>(n));

  model.log_cpt_.resize(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    const auto parent = model.parents_[f];
    const std::size_t parent_arity = parent ? model.arity_[*parent] : 1;
    const std::size_t arity = model.arity_[f];
    std::vector<double> counts(2 * parent_arity * arity, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ps = parent ? states[*parent][i] : 0;
      counts[model.cpt_index(f, train.labels[i], ps, states[f][i])] += 1;
    }
    auto& cpt = model.log_cpt_[f];
    cpt.resize(counts.size());
    for (int c = 0; c < 2; ++c) {
      for (std::size_t ps = 0; ps < parent_arity; ++ps) {
        double total = 0;
        for (std::size_t s = 0; s < arity; ++s) total += counts[model.cpt_index(f, c, ps, s)];
        const double denom = total + params.smoothing * static_cast<double>(arity);
        for (std::size_t s = 0; s < arity; ++s) {
          const auto idx = model.cpt_index(f, c, ps, s);
          // An unsmoothed, never-seen parent state carries no information.
          cpt[idx] = denom > 0 ? std::log((counts[idx] + params.smoothing) / denom)
                               : -std::log(static_cast<double>(arity));
        }
      }
    }
  }
  return model;
}

std::array<double, 2> BayesNet::posteriors(const EncounterVector& x) const {
  const std::size_t n_features = arity_.size();
  std::vector<std::size_t> s(n_features);
  for (std::size_t f = 0; f < n_features; ++f) s[f] = std::min(state(x, f), arity_[f] - 1);
  std::array<double, 2> log_joint = log_prior_;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < n_features; ++f) {
      const std::size_t ps = parents_[f] ? s[*parents_[f]] : 0;
      log_joint[c] += log_cpt_[f][cpt_index(f, c, ps, s[f])];
    }
  }
  const double m = std::max(log_joint[0], log_joint[1]);
  if (std::isinf(m) && m < 0) {
    const double p1 = std::exp(log_prior_[1]);
    return {1 - p1, p1};
  }
  const double e0 = std::exp(log_joint[0] - m);
  const double e1 = std::exp(log_joint[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double BayesNet::score_unchecked(const EncounterVector& x) const { return posteriors(x)[1]; }

nlohmann::json BayesNet::parameters_json() const {
  nlohmann::json parents = nlohmann::json::array();
  for (const auto& p : parents_) parents.push_back(p ? nlohmann::json(*p) : nlohmann::json(nullptr));
  return {{"smoothing", params_.smoothing},
          {"numeric_bins", params_.numeric_bins},
          {"min_edge_information", params_.min_edge_information},
          {"log_prior", log_prior_},
          {"arity", arity_},
          {"cutpoints", cutpoints_},
          {"parents", std::move(parents)},
          {"log_cpt", log_cpt_}};
}

BayesNet BayesNet::from_json(const SchemaShape& shape, const nlohmann::json& j) {
  BayesNet model(shape);
  model.params_.smoothing = j.at("smoothing").get<double>();
  model.params_.numeric_bins = j.at("numeric_bins").get<std::size_t>();
  model.params_.min_edge_information = j.at("min_edge_information").get<double>();
  model.log_prior_ = j.at("log_prior").get<std::array<double, 2>>();
  model.arity_ = j.at("arity").get<std::vector<std::size_t>>();
  model.cutpoints_ = j.at("cutpoints").get<std::vector<std::vector<double>>>();
  for (const auto& p : j.at("parents")) {
    model.parents_.push_back(p.is_null() ? std::nullopt : std::optional<std::size_t>(p.get<std::size_t>()));
  }
  model.log_cpt_ = j.at("log_cpt").get<std::vector<std::vector<double>>>();
  const auto n = shape.cardinalities.size();
  if (model.arity_.size() != n || model.cutpoints_.size() != n || model.parents_.size() != n ||
      model.log_cpt_.size() != n) {
    throw DataError("Bayes network model: feature count mismatch");
  }
  return model;
}

}  // namespace readmit
