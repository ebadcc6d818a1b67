#include "botsense/metrics.h"

#include <string>

#include "botsense/error.h"

namespace botsense {

ConfusionCounts confusion(const std::vector<double>& probabilities, const std::vector<int>& labels, double threshold) {
  if (probabilities.empty()) throw Error("metrics", "confusion of an empty prediction set");
  if (probabilities.size() != labels.size()) {
    throw Error("metrics", std::to_string(probabilities.size()) + " predictions vs " + std::to_string(labels.size()) +
                               " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted_human = probabilities[i] >= threshold;
    const bool human = labels[i] == 1;
    if (predicted_human && human) ++c.tp;
    else if (predicted_human) ++c.fp;
    else if (human) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_score(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const std::int64_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

MetricsReport metrics(const ConfusionCounts& c, double threshold) {
  if (c.total() <= 0) throw Error("metrics", "metrics of empty confusion counts");
  MetricsReport r;
  r.threshold = threshold;
  r.f1_human = f1_score(c.tp, c.fp, c.fn);
  r.f1_bot = f1_score(c.tn, c.fn, c.fp);
  r.macro_f1 = (r.f1_human + r.f1_bot) / 2.0;
  r.precision_human = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.recall_human = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return r;
}

}  // namespace botsense
