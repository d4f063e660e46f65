#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace readmit {

struct ScoredLabel {
  double score = 0;
  bool positive = false;
};

std::vector<ScoredLabel> pair_scores(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix operator+(const ConfusionMatrix& o) const {
    return {tp + o.tp, fp + o.fp, fn + o.fn, tn + o.tn};
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Predicted positive iff score >= threshold. Throws on empty input.
ConfusionMatrix confusion(std::span<const ScoredLabel> scored, double threshold);

/// TP / (TP + FP); 1.0 when nothing is predicted positive.
double precision(const ConfusionMatrix& cm);

/// TP / (TP + FN). Throws DataError when there are no ground-truth positives.
double recall(const ConfusionMatrix& cm);

struct PrPoint {
  double threshold = 0;
  double recall = 0;
  double precision = 0;
};

/// Points ordered by descending threshold, one per distinct score.
struct PrCurve {
  std::vector<PrPoint> points;
  double area = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;

  /// AUPRC of a scorer at chance.
  double prevalence() const {
    return static_cast<double>(positives) / static_cast<double>(positives + negatives);
  }
};

/// Area is average precision: sum over thresholds of (recall step) x precision,
/// with no interpolation between points. Tied scores enter together.
/// Throws DataError unless both classes are present.
PrCurve pr_curve(std::span<const ScoredLabel> scored);

double average_precision(std::span<const ScoredLabel> scored);

/// "threshold,recall,precision" rows.
std::string to_csv(const PrCurve& curve);
nlohmann::json summary_json(const PrCurve& curve);

}  // namespace readmit
