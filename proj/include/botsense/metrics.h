#pragma once

#include <cstdint>
#include <vector>

namespace botsense {

inline constexpr double kDecisionThreshold = 0.5;

// Human is the positive class. Bot-class counts follow by symmetry:
// TP_bot = tn, FP_bot = fn, FN_bot = fp.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Predicts human iff probability >= threshold. Throws Error("metrics") on
// empty or unequal inputs.
ConfusionCounts confusion(const std::vector<double>& probabilities, const std::vector<int>& labels,
                          double threshold = kDecisionThreshold);

struct MetricsReport {
  double f1_human = 0.0;
  double f1_bot = 0.0;
  double macro_f1 = 0.0;
  double precision_human = 0.0;
  double recall_human = 0.0;
  double accuracy = 0.0;
  double threshold = kDecisionThreshold;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// 2TP / (2TP + FP + FN), 0 when the denominator is 0.
double f1_score(std::int64_t tp, std::int64_t fp, std::int64_t fn);

// Throws Error("metrics") when counts are empty.
MetricsReport metrics(const ConfusionCounts& counts, double threshold = kDecisionThreshold);

}  // namespace botsense
