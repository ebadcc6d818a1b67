#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "botsense/evaluation.h"
#include "botsense/gradcheck_suite.h"
#include "botsense/run_config.h"

namespace botsense {

struct CommandOptions {
  int jobs = 1;
  // Runs every parallel stage on one thread.
  bool deterministic = false;
  std::function<void(const std::string&)> log;

  int effective_jobs() const { return deterministic ? 1 : jobs; }
};

// Output layout under RunConfig::output_dir.
struct OutputPaths {
  std::string root, logs, dataset, manifest, features, train, checkpoint, crossval, ablate, baseline;
};
OutputPaths output_paths(const RunConfig& config);

struct PlannedMatch {
  int index = 0;
  std::string pairing;  // "bot_bot", "bot_human", "human_human"
  int map = 0;          // index into SimulateSection::maps
  std::uint64_t seed = 0;
  Policy policy[2];
  std::string file_name;
};

// Bot-bot matches first, then bot-human, then human-human. Match i uses map
// i % maps, seed mix_seed(simulate.seed, i). Bot-human matches alternate the
// humanized seat; humanized players cycle through the personas and carry
// their archetype's agent weights.
std::vector<PlannedMatch> plan_matches(const SimulateSection& simulate);

struct SimulateReport {
  PairingCounts counts;
  int wins[2] = {0, 0};
  int draws = 0;
  std::array<int, 5> reasons{};  // indexed by VictoryReason
  double mean_turns = 0.0;
  double mean_actions = 0.0;
  double human_player_ratio = 0.0;  // humanized seats / all seats
  std::vector<std::string> files;

  nlohmann::json to_json() const;
  std::string text() const;
};

// Throws Error("io") before playing anything when the log directory is
// not writable. Previous match logs in the directory are replaced.
SimulateReport cmd_simulate(const RunConfig& config, const CommandOptions& options = {});

struct Dataset {
  DatasetManifest manifest;
  std::vector<FeatureSequence> sequences;
};

// Writes the manifest and the feature cache.
Dataset cmd_featurize(const RunConfig& config, const CommandOptions& options = {});
// Reuses the manifest and cache when they match the featurize section,
// otherwise featurizes the existing logs.
Dataset ensure_dataset(const RunConfig& config, const CommandOptions& options = {});

struct TrainOutcome {
  TrainReport report;
  std::string checkpoint;
  std::string checkpoint_hash;
};

// Fits on the whole dataset for model.epochs and writes the checkpoint,
// its sidecar and train_report.json.
TrainOutcome cmd_train(const RunConfig& config, const CommandOptions& options = {});

CVResult cmd_crossval(const RunConfig& config, const CommandOptions& options = {});
AblationResult cmd_ablate(const RunConfig& config, const CommandOptions& options = {});
CVResult cmd_baseline(const RunConfig& config, const CommandOptions& options = {});

GradCheckSuiteReport cmd_gradcheck(const GradCheckSuiteOptions& options);

struct Prediction {
  double p_human = 0.0;
  int perspective = 0;
  int predicted_label = 0;
};
Prediction cmd_predict(const std::string& checkpoint, const std::string& log_path, int perspective);

// FNV-1a 64 over the file bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

}  // namespace botsense
