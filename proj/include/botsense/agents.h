#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "botsense/game.h"
#include "botsense/match_log.h"

namespace botsense {

// ---------------------------------------------------------------------------
// Strategic layer: utility scoring of six order kinds.

enum class OrderKind : std::uint8_t { AssaultPoint, DefendPoint, HuntUnit, Retreat, SupportAlly, HoldOverwatch };
inline constexpr int kOrderKindCount = 6;
const char* order_kind_name(OrderKind k);

struct Order {
  OrderKind kind = OrderKind::Retreat;
  int target = -1;  // control point index or unit id; -1 when unparameterized
  friend bool operator==(const Order&, const Order&) = default;
};

// Orders that at most one unit may hold at a time.
bool is_exclusive(const Order& order);

enum class Consideration : std::uint8_t {
  DistanceToTarget,
  OwnHealth,
  AllyProximity,
  EnemyDensity,
  LineOfFire,
  AmmoFraction,
  ApSufficiency,
  PointUrgency,
  ThreatExposure,
  OrderPersistence,
};
inline constexpr int kConsiderationCount = 10;
const char* consideration_name(Consideration c);

using ConsiderationVector = std::array<double, kConsiderationCount>;

struct AgentConfig {
  ConsiderationVector weights = {1.0, 0.8, 0.4, 0.5, 1.2, 0.4, 0.6, 1.0, 0.6, 0.3};
  int search_budget = 1000;
  int rollout_depth = 4;
  std::uint64_t seed = 0;

  void validate() const;  // throws Error("config")
  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

enum class Archetype : std::uint8_t { Killer, Socializer, Achiever, Explorer };
const char* archetype_name(Archetype a);
Archetype archetype_from_name(const std::string& name);  // throws Error("config")

struct PersonaConfig {
  double aim_spread_extra_deg = 0.0;
  double idle_action_rate = 0.0;
  double reaction_skip_rate = 0.0;
  double friendly_fire_aversion = 0.0;
  double mistake_rate = 0.0;
  double mistake_memory_decay = 1.0;
  Archetype archetype = Archetype::Killer;

  // Default trait bundle for an archetype.
  static PersonaConfig from_archetype(Archetype a);
  void validate() const;  // throws Error("config")
  friend bool operator==(const PersonaConfig&, const PersonaConfig&) = default;
};

// Archetype-specific emphasis on top of the base bot weights.
AgentConfig apply_archetype(AgentConfig config, Archetype archetype);

using OrderMap = std::map<int, Order>;  // unit id -> order

// Every order the team could hand out, in enumeration order: assault and
// defend per control point, hunt per living enemy, retreat, support per
// living ally, overwatch. Determines tie-breaking.
std::vector<Order> enumerate_orders(const GameState& state, int team);

bool order_feasible(const GameState& state, const Unit& unit, const Order& order);

ConsiderationVector considerations(const GameState& state, const Unit& unit, const Order& order,
                                   const OrderMap& assigned = {}, const OrderMap* previous = nullptr);

struct ScoredOrder {
  Order order;
  double score = 0.0;
  ConsiderationVector factors{};
};

// Throws Error("agent") when the unit is dead or not owned by the active
// player.
std::vector<ScoredOrder> score_orders(const GameState& state, const Unit& unit, const AgentConfig& config,
                                      const OrderMap& assigned = {}, const OrderMap* previous = nullptr);

// Generic re-scoring greedy assignment. `score(unit, assigned)` returns one
// score per option (NaN = infeasible) given the picks made so far. Each
// step commits the globally best (unit, option) among unassigned units;
// ties go to the lower unit index, then the lower option index. Exclusive
// options can be picked once.
struct GreedyPick {
  int unit = 0;
  int option = 0;
  double score = 0.0;
};
std::vector<GreedyPick> greedy_assign(
    int unit_count, int option_count,
    const std::function<std::vector<double>(int unit, const std::vector<GreedyPick>& so_far)>& score,
    const std::function<bool(int option)>& exclusive);

struct Assignment {
  int unit = 0;
  Order order;
  double score = 0.0;
};

// Assignments in commit order. Covers every living unit of the active
// player exactly once.
std::vector<Assignment> assign_orders(const GameState& state, const AgentConfig& config,
                                      const OrderMap* previous = nullptr);

OrderMap to_order_map(const std::vector<Assignment>& assignments);

// ---------------------------------------------------------------------------
// Tactical layer: budgeted best-first rollout search.

// Progress of `unit_id` on `order` in [0,1]; the planner's leaf evaluation.
double order_progress(const GameState& state, int unit_id, const Order& order);

// Candidate actions for one unit, legal in `state`, most promising first.
std::vector<Action> candidate_actions(const GameState& state, const Unit& unit, const Order& order);

struct PlanResult {
  std::vector<Action> actions;  // excludes the closing EndTurn
  int expansions = 0;
  bool greedy_fallback = false;
};

PlanResult plan_turn(const GameState& state, const std::vector<Assignment>& orders, const AgentConfig& config);

// ---------------------------------------------------------------------------
// Humanizer.

enum class MistakeClass : std::uint8_t { Overextend, PrematureReload, WastedGrenade };
inline constexpr int kMistakeClassCount = 3;
const char* mistake_name(MistakeClass m);

struct MistakeMemory {
  std::array<int, kMistakeClassCount> counts{};
};

// rate × decay^(times this class was already made).
double mistake_probability(const PersonaConfig& persona, const MistakeMemory& memory, MistakeClass mistake);

// Rewrites a bot plan with the persona's traits. Output actions are legal
// in sequence when re-simulated from `state`.
std::vector<Action> humanize(const std::vector<Action>& plan, const GameState& state, const PersonaConfig& persona,
                             MistakeMemory& memory, Rng& rng);

// ---------------------------------------------------------------------------
// Match runner.

struct Policy {
  std::string name = "bot";
  AgentConfig agent;
  std::optional<PersonaConfig> persona;

  bool humanized() const { return persona.has_value(); }
  std::string descriptor() const;
};

struct MatchOptions {
  int units_per_team = 4;
  GameRules rules;
  int max_actions_per_turn = 40;
  friend bool operator==(const MatchOptions&, const MatchOptions&) = default;
};

MatchLog play_match(std::shared_ptr<const MapGeometry> map, const Policy& policy0, const Policy& policy1,
                    std::uint64_t seed, const MatchOptions& options = {});

}  // namespace botsense
