#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "botsense/dataset.h"
#include "botsense/metrics.h"
#include "botsense/model.h"

namespace botsense {

struct CVPlan {
  int k = 5;
  std::uint64_t seed = 0;
  // Fraction of each training split's matches held out for early stopping;
  // 0 trains for the configured epochs without validation.
  double inner_validation = 0.2;

  void validate() const;  // throws Error("config")
  friend bool operator==(const CVPlan&, const CVPlan&) = default;
};

nlohmann::json to_json(const CVPlan& plan);
CVPlan cv_plan_from_json(const nlohmann::json& j);

// Fold index per manifest entry. Matches (entry groups) are atomic and
// stratified by label composition (bot-bot, bot-human, human-human), dealt
// round-robin after a seeded shuffle. Throws Error("evaluation") when a
// class has fewer than k matches or a fold's held-out set lacks a class.
std::vector<int> assign_folds(const DatasetManifest& manifest, const CVPlan& plan);

// FNV-1a over the fold assignment, as 16 hex digits.
std::string fold_hash(const std::vector<int>& folds);

struct FoldResult {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  ConfusionCounts counts;
  MetricsReport metrics;
  TrainReport train;
};

struct CVResult {
  std::string model;  // variant name or "baseline"
  std::vector<FoldResult> folds;
  MetricsReport mean;
  MetricsReport stddev;  // sample standard deviation over folds
  std::string fold_hash;
};

// Unweighted mean and sample standard deviation of the fold metrics.
void aggregate(CVResult& result);

struct EvalOptions {
  int jobs = 1;
  // Directory for per-fold checkpoints; empty keeps models in memory.
  std::string checkpoint_dir;
  std::function<void(const std::string&)> log;
};

// `sequences` is aligned with manifest.entries.
CVResult cross_validate(const DatasetManifest& manifest, const std::vector<FeatureSequence>& sequences,
                        const ModelConfig& config, const CVPlan& plan, const EvalOptions& options = {});

struct AblationResult {
  std::vector<CVResult> rows;  // full, rnn_only, cnn_only
  std::vector<std::string> log;
};

AblationResult run_ablation(const DatasetManifest& manifest, const std::vector<FeatureSequence>& sequences,
                            const ModelConfig& base, const CVPlan& plan, const EvalOptions& options = {});

struct BaselineConfig {
  int iterations = 2000;
  double lr = 0.5;
  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

// Logistic regression on standardized summary features, fitted by
// full-batch gradient descent on weighted BCE from zero weights.
class LogisticBaseline {
 public:
  void fit(const std::vector<ScalarVector>& x, const std::vector<int>& labels, const std::vector<double>& weights,
           const BaselineConfig& config = {});
  double predict(const ScalarVector& x) const;

  ScalarVector mean{}, scale{};
  std::array<double, kScalarFeatures> weights{};
  double bias = 0.0;

  LogisticBaseline() { scale.fill(1.0f); }
};

// Summary vectors aligned with manifest.entries.
std::vector<ScalarVector> load_summaries(const DatasetManifest& manifest);

CVResult run_baseline(const DatasetManifest& manifest, const std::vector<ScalarVector>& summaries,
                      const std::vector<double>& weights, const CVPlan& plan, const BaselineConfig& config = {});

// One row per fold plus an aggregate row.
std::string cv_csv(const std::vector<CVResult>& results);
// Columns F1 (macro), Precision(H), Recall(H) as mean +/- std.
std::string results_table(const std::vector<CVResult>& results);

}  // namespace botsense
