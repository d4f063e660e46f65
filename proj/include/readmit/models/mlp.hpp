#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "readmit/models/bfgs.hpp"
#include "readmit/models/scorer.hpp"

namespace readmit {

struct MlpParams {
  std::size_t hidden_nodes = 2;
  /// Weight of the sum of squared connection weights (biases are not penalized).
  double penalty_weight = 1e-3;
  std::size_t bfgs_max_iters = 200;
  double bfgs_tolerance = 1e-6;
  std::uint64_t seed = 1;
};

/// Parameter layout: for each hidden node h, inputs weights then its bias
/// (h * (D + 1) .. h * (D + 1) + D); then the H output weights and the output bias.
std::size_t mlp_parameter_count(std::size_t inputs, std::size_t hidden);

/// Mean squared error of a one-hidden-layer sigmoid network plus
/// penalty_weight * sum of squared non-bias weights, with its analytic gradient.
class MlpObjective {
 public:
  /// `inputs` is row-major, rows x `dims`.
  MlpObjective(std::vector<double> inputs, std::size_t dims, std::vector<double> targets, std::size_t hidden,
               double penalty_weight);

  double operator()(std::span<const double> w, std::span<double> grad) const;
  double value(std::span<const double> w) const;

  std::size_t parameter_count() const { return mlp_parameter_count(dims_, hidden_); }
  std::size_t rows() const { return targets_.size(); }

 private:
  std::vector<double> inputs_;
  std::size_t dims_;
  std::vector<double> targets_;
  std::size_t hidden_;
  double penalty_;
};

/// Network output for one standardized input vector.
double mlp_forward(std::span<const double> w, std::span<const double> input, std::size_t hidden);

/// Multilayer perceptron on standardized one-hot inputs, trained by BFGS.
class Mlp final : public Scorer {
 public:
  static Mlp train(const TrainingSet& train, const MlpParams& params = {});
  static Mlp from_json(const SchemaShape& shape, const nlohmann::json& j);
  /// Assembles a network directly; used to probe fixed weights.
  static Mlp from_parameters(const SchemaShape& shape, std::size_t hidden, std::vector<double> weights,
                             std::vector<double> input_mean, std::vector<double> input_scale);

  ModelKind kind() const override { return ModelKind::kMlp; }
  nlohmann::json parameters_json() const override;

  const std::vector<double>& weights() const { return weights_; }
  const BfgsResult& training_trace() const { return trace_; }

  /// One-hot encoding implied by the schema shape, before standardization.
  static std::vector<double> onehot(const SchemaShape& shape, const EncounterVector& x);

 protected:
  double score_unchecked(const EncounterVector& x) const override;

 private:
  explicit Mlp(SchemaShape shape) : Scorer(std::move(shape)) {}

  MlpParams params_;
  std::vector<double> input_mean_;
  std::vector<double> input_scale_;
  std::vector<double> weights_;
  BfgsResult trace_;
};

}  // namespace readmit
