#include "readmit/models/mlp.hpp"

#include <cmath>

#include "readmit/error.hpp"
#include "readmit/rng.hpp"

namespace readmit {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::size_t mlp_parameter_count(std::size_t inputs, std::size_t hidden) { return hidden * (inputs + 1) + hidden + 1; }

double mlp_forward(std::span<const double> w, std::span<const double> input, std::size_t hidden) {
  const std::size_t d = input.size();
  const std::size_t out = hidden * (d + 1);
  double z = w[out + hidden];
  for (std::size_t h = 0; h < hidden; ++h) {
    const double* wh = w.data() + h * (d + 1);
    double a = wh[d];
    for (std::size_t k = 0; k < d; ++k) a += wh[k] * input[k];
    z += w[out + h] * sigmoid(a);
  }
  return sigmoid(z);
}

MlpObjective::MlpObjective(std::vector<double> inputs, std::size_t dims, std::vector<double> targets,
                           std::size_t hidden, double penalty_weight)
    : inputs_(std::move(inputs)), dims_(dims), targets_(std::move(targets)), hidden_(hidden), penalty_(penalty_weight) {
  if (inputs_.size() != dims_ * targets_.size()) throw DataError("MLP: input matrix does not match target count");
  if (targets_.empty()) throw DataError("MLP: no training rows");
}

double MlpObjective::operator()(std::span<const double> w, std::span<double> grad) const {
  const std::size_t d = dims_;
  const std::size_t hidden = hidden_;
  const std::size_t out = hidden * (d + 1);
  const double inv_n = 1.0 / static_cast<double>(targets_.size());
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> act(hidden);
  double loss = 0;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const double* x = inputs_.data() + i * d;
    double z = w[out + hidden];
    for (std::size_t h = 0; h < hidden; ++h) {
      const double* wh = w.data() + h * (d + 1);
      double a = wh[d];
      for (std::size_t k = 0; k < d; ++k) a += wh[k] * x[k];
      act[h] = sigmoid(a);
      z += w[out + h] * act[h];
    }
    const double o = sigmoid(z);
    const double err = o - targets_[i];
    loss += err * err;
    // d(err^2)/dz
    const double delta_out = 2.0 * err * o * (1.0 - o) * inv_n;
    grad[out + hidden] += delta_out;
    for (std::size_t h = 0; h < hidden; ++h) {
      grad[out + h] += delta_out * act[h];
      const double delta_h = delta_out * w[out + h] * act[h] * (1.0 - act[h]);
      double* gh = grad.data() + h * (d + 1);
      for (std::size_t k = 0; k < d; ++k) gh[k] += delta_h * x[k];
      gh[d] += delta_h;
    }
  }
  loss *= inv_n;
  double penalty = 0;
  for (std::size_t h = 0; h < hidden; ++h) {
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t idx = h * (d + 1) + k;
      penalty += w[idx] * w[idx];
      grad[idx] += 2.0 * penalty_ * w[idx];
    }
    penalty += w[out + h] * w[out + h];
    grad[out + h] += 2.0 * penalty_ * w[out + h];
  }
  return loss + penalty_ * penalty;
}

double MlpObjective::value(std::span<const double> w) const {
  std::vector<double> grad(w.size());
  return (*this)(w, grad);
}

std::vector<double> Mlp::onehot(const SchemaShape& shape, const EncounterVector& x) {
  std::vector<double> out;
  for (std::size_t f = 0; f < shape.cardinalities.size(); ++f) {
    const auto card = shape.cardinalities[f];
    if (card == 0) {
      out.push_back(x.features[f]);
    } else {
      const auto start = out.size();
      out.resize(start + card, 0.0);
      out[start + static_cast<std::size_t>(x.features[f])] = 1.0;
    }
  }
  return out;
}

Mlp Mlp::train(const TrainingSet& train, const MlpParams& params) {
  if (params.hidden_nodes < 1 || params.penalty_weight < 0) {
    throw UsageError("MLP: hidden_nodes must be >= 1 and penalty_weight >= 0");
  }
  require_both_classes(train, "MLP");
  Mlp model(SchemaShape::of(train.schema));
  model.params_ = params;
  const std::size_t n = train.size();

  std::vector<double> inputs;
  std::size_t d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = onehot(model.schema_shape(), train.rows[i]);
    d = row.size();
    inputs.insert(inputs.end(), row.begin(), row.end());
  }
  model.input_mean_.assign(d, 0.0);
  model.input_scale_.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) model.input_mean_[k] += inputs[i * d + k];
  }
  for (auto& m : model.input_mean_) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double c = inputs[i * d + k] - model.input_mean_[k];
      model.input_scale_[k] += c * c;
    }
  }
  for (auto& s : model.input_scale_) {
    s = std::sqrt(s / static_cast<double>(n));
    if (s == 0) s = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      inputs[i * d + k] = (inputs[i * d + k] - model.input_mean_[k]) / model.input_scale_[k];
    }
  }

  std::vector<double> targets(train.labels.begin(), train.labels.end());
  const MlpObjective objective(std::move(inputs), d, std::move(targets), params.hidden_nodes, params.penalty_weight);
  Rng rng(derive_seed(params.seed, 0));
  std::vector<double> w0(objective.parameter_count());
  for (auto& w : w0) w = rng.uniform(-0.5, 0.5);

  BfgsOptions options;
  options.max_iterations = params.bfgs_max_iters;
  options.gradient_tolerance = params.bfgs_tolerance;
  model.trace_ = minimize_bfgs([&](std::span<const double> w, std::span<double> g) { return objective(w, g); },
                               std::move(w0), options);
  model.weights_ = model.trace_.x;
  return model;
}

Mlp Mlp::from_parameters(const SchemaShape& shape, std::size_t hidden, std::vector<double> weights,
                         std::vector<double> input_mean, std::vector<double> input_scale) {
  Mlp model(shape);
  std::size_t d = 0;
  for (const auto c : shape.cardinalities) d += c == 0 ? 1 : c;
  if (hidden < 1 || weights.size() != mlp_parameter_count(d, hidden) || input_mean.size() != d ||
      input_scale.size() != d) {
    throw DataError("MLP model: parameter sizes do not match the schema");
  }
  for (const double s : input_scale) {
    if (!(s > 0)) throw DataError("MLP model: input scale must be positive");
  }
  model.params_.hidden_nodes = hidden;
  model.weights_ = std::move(weights);
  model.input_mean_ = std::move(input_mean);
  model.input_scale_ = std::move(input_scale);
  return model;
}

double Mlp::score_unchecked(const EncounterVector& x) const {
  auto input = onehot(schema_shape(), x);
  for (std::size_t k = 0; k < input.size(); ++k) input[k] = (input[k] - input_mean_[k]) / input_scale_[k];
  return mlp_forward(weights_, input, params_.hidden_nodes);
}

nlohmann::json Mlp::parameters_json() const {
  return {{"hidden_nodes", params_.hidden_nodes},
          {"penalty_weight", params_.penalty_weight},
          {"bfgs_max_iters", params_.bfgs_max_iters},
          {"bfgs_tolerance", params_.bfgs_tolerance},
          {"seed", params_.seed},
          {"input_mean", input_mean_},
          {"input_scale", input_scale_},
          {"weights", weights_}};
}

Mlp Mlp::from_json(const SchemaShape& shape, const nlohmann::json& j) {
  auto model = from_parameters(shape, j.at("hidden_nodes").get<std::size_t>(), j.at("weights").get<std::vector<double>>(),
                               j.at("input_mean").get<std::vector<double>>(),
                               j.at("input_scale").get<std::vector<double>>());
  model.params_.penalty_weight = j.at("penalty_weight").get<double>();
  model.params_.bfgs_max_iters = j.at("bfgs_max_iters").get<std::size_t>();
  model.params_.bfgs_tolerance = j.at("bfgs_tolerance").get<double>();
  model.params_.seed = j.at("seed").get<std::uint64_t>();
  return model;
}

}  // namespace readmit
