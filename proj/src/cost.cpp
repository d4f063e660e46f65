#include "readmit/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "readmit/error.hpp"

namespace readmit {

std::int64_t to_cents(double dollars) { return std::llround(dollars * 100.0); }

double to_dollars(std::int64_t cents) { return static_cast<double>(cents) / 100.0; }

void validate(const CostParams& params) {
  if (!(params.beta > 0 && params.alpha > params.beta)) {
    throw UsageError("cost: expected alpha > beta > 0");
  }
}

SavedCostMatrix saved_cost_matrix(const CostParams& params) {
  return {to_cents(params.alpha) - to_cents(params.beta), -to_cents(params.beta), 0, 0};
}

std::int64_t saved_cost_cents(const ConfusionMatrix& cm, const CostParams& params) {
  const auto s = saved_cost_matrix(params);
  return static_cast<std::int64_t>(cm.tp) * s.tp_cents + static_cast<std::int64_t>(cm.fp) * s.fp_cents +
         static_cast<std::int64_t>(cm.fn) * s.fn_cents + static_cast<std::int64_t>(cm.tn) * s.tn_cents;
}

double saved_cost(const ConfusionMatrix& cm, const CostParams& params) {
  return to_dollars(saved_cost_cents(cm, params));
}

std::vector<double> candidate_thresholds(std::span<const ScoredLabel> scored) {
  std::vector<double> t{0.0};
  double top = 1.0;
  for (const auto& s : scored) {
    t.push_back(s.score);
    top = std::max(top, s.score);
  }
  t.push_back(std::nextafter(top, std::numeric_limits<double>::infinity()));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

ThresholdResult optimize_threshold(std::span<const ScoredLabel> scored, const CostParams& params) {
  validate(params);
  std::size_t positives = 0;
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) throw DataError("cost: non-finite score");
    positives += s.positive;
  }
  if (positives == 0 || positives == scored.size()) {
    throw DataError("cost: threshold optimization needs both classes");
  }
  std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(), [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
  const auto thresholds = candidate_thresholds(scored);
  const std::size_t negatives = scored.size() - positives;

  // Walk thresholds from high to low, admitting rows with score >= t.
  ThresholdResult best;
  bool have_best = false;
  std::size_t tp = 0, fp = 0, next = 0;
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    while (next < sorted.size() && sorted[next].score >= *it) {
      (sorted[next].positive ? tp : fp) += 1;
      ++next;
    }
    const ConfusionMatrix cm{tp, fp, positives - tp, negatives - fp};
    const auto saved = saved_cost_cents(cm, params);
    // >= while descending leaves the lowest threshold among ties.
    if (!have_best || saved >= best.saved_cents) {
      best = {*it, cm, saved};
      have_best = true;
    }
  }
  return best;
}

ThresholdResult apply_threshold(std::span<const ScoredLabel> scored, double threshold, const CostParams& params) {
  validate(params);
  const auto cm = confusion(scored, threshold);
  return {threshold, cm, saved_cost_cents(cm, params)};
}

double extrapolate_total(double saved_test, std::size_t n_test, std::size_t n_total) {
  if (n_test == 0) throw UsageError("cost: cannot extrapolate from an empty test set");
  return saved_test * static_cast<double>(n_total) / static_cast<double>(n_test);
}

std::int64_t derive_beta(double alpha, double avg_stay_days) {
  if (!(avg_stay_days > 0)) throw UsageError("cost: average stay must be positive");
  return std::llround(alpha / avg_stay_days);
}

nlohmann::json to_json(const ThresholdResult& result) {
  return {{"threshold", result.threshold},
          {"confusion",
           {{"tp", result.confusion.tp}, {"fp", result.confusion.fp}, {"fn", result.confusion.fn},
            {"tn", result.confusion.tn}}},
          {"saved_cost", result.saved()},
          {"saved_cost_cents", result.saved_cents}};
}

}  // namespace readmit
