#include "botsense/run_config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "botsense/error.h"
#include "botsense/json_io.h"

namespace botsense {

namespace fs = std::filesystem;

namespace {

// Rejects keys outside `known`, prefixing diagnostics with `where`.
void check_keys(const Json& j, const std::string& where, const std::set<std::string>& known) {
  if (!j.is_object()) throw Error("config", where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw Error("config", where + "." + it.key() + ": unknown field");
  }
}

template <typename T>
void read(const Json& j, const std::string& where, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(dst);
  } catch (const Json::exception& e) {
    throw Error("config", where + "." + key + ": " + e.what());
  }
}

Json to_json(const MatchOptions& m) {
  return {{"units_per_team", m.units_per_team},
          {"max_actions_per_turn", m.max_actions_per_turn},
          {"rules", botsense::to_json(m.rules)}};
}

MatchOptions match_options_from_json(const Json& j) {
  const std::string where = "simulate.match";
  check_keys(j, where, {"units_per_team", "max_actions_per_turn", "rules"});
  MatchOptions m;
  read(j, where, "units_per_team", m.units_per_team);
  read(j, where, "max_actions_per_turn", m.max_actions_per_turn);
  if (j.contains("rules")) {
    try {
      m.rules = rules_from_json(j.at("rules"));
    } catch (const Error& e) {
      throw Error("config", where + ".rules: " + e.what());
    }
  }
  return m;
}

Json to_json(const PairingCounts& p) {
  return {{"bot_bot", p.bot_bot}, {"bot_human", p.bot_human}, {"human_human", p.human_human}};
}

PairingCounts pairing_from_json(const Json& j) {
  const std::string where = "simulate.matches";
  check_keys(j, where, {"bot_bot", "bot_human", "human_human"});
  PairingCounts p;
  read(j, where, "bot_bot", p.bot_bot);
  read(j, where, "bot_human", p.bot_human);
  read(j, where, "human_human", p.human_human);
  return p;
}

}  // namespace

Json to_json(const AgentConfig& a) {
  return {{"weights", a.weights}, {"search_budget", a.search_budget}, {"rollout_depth", a.rollout_depth}, {"seed", a.seed}};
}

AgentConfig agent_config_from_json(const Json& j) {
  const std::string where = "simulate.agent";
  check_keys(j, where, {"weights", "search_budget", "rollout_depth", "seed"});
  AgentConfig a;
  read(j, where, "weights", a.weights);
  read(j, where, "search_budget", a.search_budget);
  read(j, where, "rollout_depth", a.rollout_depth);
  read(j, where, "seed", a.seed);
  try {
    a.validate();
  } catch (const Error& e) {
    throw Error("config", where + ": " + e.what());
  }
  return a;
}

Json to_json(const PersonaConfig& p) {
  return {{"archetype", archetype_name(p.archetype)},
          {"aim_spread_extra_deg", p.aim_spread_extra_deg},
          {"idle_action_rate", p.idle_action_rate},
          {"reaction_skip_rate", p.reaction_skip_rate},
          {"friendly_fire_aversion", p.friendly_fire_aversion},
          {"mistake_rate", p.mistake_rate},
          {"mistake_memory_decay", p.mistake_memory_decay}};
}

PersonaConfig persona_config_from_json(const Json& j) {
  const std::string where = "simulate.personas[]";
  check_keys(j, where,
             {"archetype", "aim_spread_extra_deg", "idle_action_rate", "reaction_skip_rate", "friendly_fire_aversion",
              "mistake_rate", "mistake_memory_decay"});
  std::string name = "killer";
  read(j, where, "archetype", name);
  PersonaConfig p;
  try {
    p = PersonaConfig::from_archetype(archetype_from_name(name));
  } catch (const Error& e) {
    throw Error("config", where + ".archetype: " + e.what());
  }
  read(j, where, "aim_spread_extra_deg", p.aim_spread_extra_deg);
  read(j, where, "idle_action_rate", p.idle_action_rate);
  read(j, where, "reaction_skip_rate", p.reaction_skip_rate);
  read(j, where, "friendly_fire_aversion", p.friendly_fire_aversion);
  read(j, where, "mistake_rate", p.mistake_rate);
  read(j, where, "mistake_memory_decay", p.mistake_memory_decay);
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error("config", where + ": " + e.what());
  }
  return p;
}

std::string RunConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).lexically_normal().string();
}

void RunConfig::validate() const {
  const SimulateSection& s = simulate;
  if (s.matches.bot_bot < 0 || s.matches.bot_human < 0 || s.matches.human_human < 0) {
    throw Error("config", "simulate.matches: counts must be non-negative");
  }
  if (s.matches.total() > 0 && s.maps.empty()) throw Error("config", "simulate.maps: at least one map is required");
  for (const std::string& m : s.maps) {
    if (!fs::is_regular_file(resolve(m))) throw Error("config", "simulate.maps: map file not found: " + resolve(m));
  }
  if (s.matches.bot_human + s.matches.human_human > 0 && s.personas.empty()) {
    throw Error("config", "simulate.personas: humanized pairings need at least one persona");
  }
  if (s.match.units_per_team < 1) throw Error("config", "simulate.match.units_per_team: must be >= 1");
  if (s.match.max_actions_per_turn < 1) throw Error("config", "simulate.match.max_actions_per_turn: must be >= 1");
  if (featurize.T < 1) throw Error("config", "featurize.T: must be >= 1");
  if (featurize.R < kMinRaster) throw Error("config", "featurize.R: must be >= " + std::to_string(kMinRaster));
  model.validate();
  if (model.T != featurize.T) throw Error("config", "model.T: must equal featurize.T");
  if (model.R != featurize.R) throw Error("config", "model.R: must equal featurize.R");
  evaluate.plan.validate();
  if (evaluate.baseline_config.iterations < 0) throw Error("config", "evaluate.baseline_iterations: must be >= 0");
  if (output_dir.empty()) throw Error("config", "output_dir: must not be empty");
}

void RunConfig::override_seeds(std::uint64_t seed) {
  simulate.seed = seed;
  simulate.agent.seed = seed;
  featurize.seed = seed;
  model.seed = seed;
  evaluate.plan.seed = seed;
}

Json to_json(const RunConfig& c) {
  Json personas = Json::array();
  for (const PersonaConfig& p : c.simulate.personas) personas.push_back(to_json(p));
  return {{"simulate",
           {{"maps", c.simulate.maps},
            {"matches", to_json(c.simulate.matches)},
            {"agent", to_json(c.simulate.agent)},
            {"personas", personas},
            {"match", to_json(c.simulate.match)},
            {"seed", c.simulate.seed}}},
          {"featurize",
           {{"T", c.featurize.T},
            {"R", c.featurize.R},
            {"balance", balance_name(c.featurize.balance)},
            {"seed", c.featurize.seed},
            {"first_player_only", c.featurize.first_player_only}}},
          {"model", to_json(c.model)},
          {"evaluate",
           {{"plan", to_json(c.evaluate.plan)},
            {"ablation", c.evaluate.ablation},
            {"baseline", c.evaluate.baseline},
            {"baseline_iterations", c.evaluate.baseline_config.iterations},
            {"baseline_lr", c.evaluate.baseline_config.lr}}},
          {"output_dir", c.output_dir}};
}

RunConfig run_config_from_json(const Json& j, const std::string& base_dir) {
  check_keys(j, "config", {"simulate", "featurize", "model", "evaluate", "output_dir"});
  RunConfig c;
  c.base_dir = base_dir;

  const Json sim = j.value("simulate", Json::object());
  check_keys(sim, "simulate", {"maps", "matches", "agent", "personas", "match", "seed"});
  read(sim, "simulate", "maps", c.simulate.maps);
  if (sim.contains("matches")) c.simulate.matches = pairing_from_json(sim.at("matches"));
  if (sim.contains("agent")) c.simulate.agent = agent_config_from_json(sim.at("agent"));
  if (sim.contains("personas")) {
    if (!sim.at("personas").is_array()) throw Error("config", "simulate.personas: expected an array");
    for (const Json& p : sim.at("personas")) c.simulate.personas.push_back(persona_config_from_json(p));
  }
  if (sim.contains("match")) c.simulate.match = match_options_from_json(sim.at("match"));
  read(sim, "simulate", "seed", c.simulate.seed);

  const Json feat = j.value("featurize", Json::object());
  check_keys(feat, "featurize", {"T", "R", "balance", "seed", "first_player_only"});
  read(feat, "featurize", "T", c.featurize.T);
  read(feat, "featurize", "R", c.featurize.R);
  if (feat.contains("balance")) {
    std::string b;
    read(feat, "featurize", "balance", b);
    try {
      c.featurize.balance = balance_from_name(b);
    } catch (const Error& e) {
      throw Error("config", std::string("featurize.balance: ") + e.what());
    }
  }
  read(feat, "featurize", "seed", c.featurize.seed);
  read(feat, "featurize", "first_player_only", c.featurize.first_player_only);

  Json model = j.value("model", Json::object());
  if (!model.is_object()) throw Error("config", "model: expected an object");
  if (!model.contains("T")) model["T"] = c.featurize.T;
  if (!model.contains("R")) model["R"] = c.featurize.R;
  c.model = model_config_from_json(model);

  const Json ev = j.value("evaluate", Json::object());
  check_keys(ev, "evaluate", {"plan", "ablation", "baseline", "baseline_iterations", "baseline_lr"});
  if (ev.contains("plan")) c.evaluate.plan = cv_plan_from_json(ev.at("plan"));
  read(ev, "evaluate", "ablation", c.evaluate.ablation);
  read(ev, "evaluate", "baseline", c.evaluate.baseline);
  read(ev, "evaluate", "baseline_iterations", c.evaluate.baseline_config.iterations);
  read(ev, "evaluate", "baseline_lr", c.evaluate.baseline_config.lr);

  read(j, "config", "output_dir", c.output_dir);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw Error("config", path + ": " + e.what());
  }
  return run_config_from_json(j, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

}  // namespace botsense
