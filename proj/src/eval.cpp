#include "readmit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "readmit/error.hpp"

namespace readmit {

std::vector<ScoredLabel> pair_scores(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DataError("score and label counts differ");
  std::vector<ScoredLabel> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {scores[i], labels[i] != 0};
  return out;
}

ConfusionMatrix confusion(std::span<const ScoredLabel> scored, double threshold) {
  if (scored.empty()) throw DataError("confusion matrix of an empty score list");
  ConfusionMatrix cm;
  for (const auto& s : scored) {
    const bool predicted = s.score >= threshold;
    if (predicted) {
      ++(s.positive ? cm.tp : cm.fp);
    } else {
      ++(s.positive ? cm.fn : cm.tn);
    }
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fp == 0) return 1.0;
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
}

double recall(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) throw DataError("recall is undefined without ground-truth positives");
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

PrCurve pr_curve(std::span<const ScoredLabel> scored) {
  PrCurve curve;
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) throw DataError("non-finite score in PR curve input");
    ++(s.positive ? curve.positives : curve.negatives);
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    throw DataError("PR curve needs both positive and negative instances");
  }

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });

  const double positives = static_cast<double>(curve.positives);
  std::size_t tp = 0;
  std::size_t fp = 0;
  double previous_recall = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scored[order[i]].score;
    while (i < order.size() && scored[order[i]].score == threshold) {
      ++(scored[order[i]].positive ? tp : fp);
      ++i;
    }
    const double r = static_cast<double>(tp) / positives;
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.area += (r - previous_recall) * p;
    previous_recall = r;
    curve.points.push_back({threshold, r, p});
  }
  return curve;
}

double average_precision(std::span<const ScoredLabel> scored) { return pr_curve(scored).area; }

std::string to_csv(const PrCurve& curve) {
  std::string out = "threshold,recall,precision\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.recall, p.precision);
    out += buf;
  }
  return out;
}

nlohmann::json summary_json(const PrCurve& curve) {
  return {{"auprc", curve.area},
          {"positives", curve.positives},
          {"negatives", curve.negatives},
          {"chance_auprc", curve.prevalence()},
          {"points", curve.points.size()}};
}

}  // namespace readmit
