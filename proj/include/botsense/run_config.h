#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "botsense/agents.h"
#include "botsense/dataset.h"
#include "botsense/evaluation.h"
#include "botsense/model.h"

namespace botsense {

struct PairingCounts {
  int bot_bot = 0;
  int bot_human = 0;
  int human_human = 0;

  int total() const { return bot_bot + bot_human + human_human; }
  friend bool operator==(const PairingCounts&, const PairingCounts&) = default;
};

struct SimulateSection {
  // Map files, resolved against the config file's directory.
  std::vector<std::string> maps;
  PairingCounts matches;
  AgentConfig agent;
  // Humanized players cycle through these.
  std::vector<PersonaConfig> personas;
  MatchOptions match;
  std::uint64_t seed = 1;
  friend bool operator==(const SimulateSection&, const SimulateSection&) = default;
};

struct FeaturizeSection {
  int T = 32;
  int R = 64;
  BalancePolicy balance = BalancePolicy::ClassWeights;
  std::uint64_t seed = 1;
  bool first_player_only = false;
  friend bool operator==(const FeaturizeSection&, const FeaturizeSection&) = default;
};

struct EvaluateSection {
  CVPlan plan;
  bool ablation = true;
  bool baseline = true;
  BaselineConfig baseline_config;
  friend bool operator==(const EvaluateSection&, const EvaluateSection&) = default;
};

struct RunConfig {
  SimulateSection simulate;
  FeaturizeSection featurize;
  ModelConfig model;
  EvaluateSection evaluate;
  std::string output_dir = "out";
  // Directory of the config file; relative map paths resolve against it.
  std::string base_dir = ".";

  // Throws Error("config") naming the offending field, including missing
  // map files.
  void validate() const;
  // Same seed everywhere: simulation, agents, balancing, model, folds.
  void override_seeds(std::uint64_t seed);
  std::string resolve(const std::string& path) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& config);
// Missing sections and keys take defaults; unknown keys are rejected.
// Model T/R default to the featurize section's values.
RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const AgentConfig& a);
AgentConfig agent_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PersonaConfig& p);
// Starts from the archetype bundle, then applies explicit overrides.
PersonaConfig persona_config_from_json(const nlohmann::json& j);

}  // namespace botsense
