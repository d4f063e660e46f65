#pragma once

#include <cstdint>
#include <span>

#include <json.hpp>

#include "readmit/eval.hpp"

namespace readmit {

/// Dollar amounts; held internally as whole cents.
struct CostParams {
  /// Cost of one readmission.
  double alpha = 10591;
  /// Cost of the extra admission day given to each flagged patient.
  double beta = 2409;
};

std::int64_t to_cents(double dollars);
double to_dollars(std::int64_t cents);

/// Throws UsageError unless alpha > beta > 0.
void validate(const CostParams& params);

/// Savings per outcome relative to doing nothing: tp alpha - beta, fp -beta,
/// fn and tn 0.
struct SavedCostMatrix {
  std::int64_t tp_cents = 0;
  std::int64_t fp_cents = 0;
  std::int64_t fn_cents = 0;
  std::int64_t tn_cents = 0;
};

SavedCostMatrix saved_cost_matrix(const CostParams& params);

std::int64_t saved_cost_cents(const ConfusionMatrix& cm, const CostParams& params);
double saved_cost(const ConfusionMatrix& cm, const CostParams& params);

struct ThresholdResult {
  double threshold = 0;
  ConfusionMatrix confusion;
  std::int64_t saved_cents = 0;

  double saved() const { return to_dollars(saved_cents); }
};

/// Candidate thresholds used by optimize_threshold, ascending: every distinct
/// score, 0, and the next double above max(1, highest score).
std::vector<double> candidate_thresholds(std::span<const ScoredLabel> scored);

/// Threshold maximizing saved cost (predicted positive iff score >= threshold).
/// Ties go to the lower threshold. Throws DataError on a single-class input.
ThresholdResult optimize_threshold(std::span<const ScoredLabel> scored, const CostParams& params);

ThresholdResult apply_threshold(std::span<const ScoredLabel> scored, double threshold, const CostParams& params);

/// saved_test * n_total / n_test. Throws UsageError when n_test is 0.
double extrapolate_total(double saved_test, std::size_t n_test, std::size_t n_total);

/// alpha / avg_stay_days rounded to whole dollars.
std::int64_t derive_beta(double alpha, double avg_stay_days);

nlohmann::json to_json(const ThresholdResult& result);

}  // namespace readmit
