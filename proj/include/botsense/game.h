#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "botsense/geometry.h"
#include "botsense/map.h"
#include "botsense/rng.h"

namespace botsense {

inline constexpr int kMaxUnitsPerTeam = 4;
inline constexpr int kMaxGadgets = 3;

enum class WeaponKind : std::uint8_t { Rifle, Shotgun, Sniper };

struct Weapon {
  WeaponKind kind = WeaponKind::Rifle;
  double damage = 0.0;
  double range = 0.0;
  double ap_cost_single = 0.0;
  double ap_cost_burst = 0.0;
  int magazine = 0;
  int loaded_rounds = 0;
  int burst_rounds = 1;
  double aim_spread_deg = 0.0;

  friend bool operator==(const Weapon&, const Weapon&) = default;
};

Weapon make_weapon(WeaponKind kind);
const char* weapon_name(WeaponKind kind);

enum class GadgetKind : std::uint8_t { Grenade, Mine, Shield };

struct Gadget {
  GadgetKind kind = GadgetKind::Grenade;
  int charges = 0;
  friend bool operator==(const Gadget&, const Gadget&) = default;
};

inline bool is_throwable(GadgetKind k) { return k != GadgetKind::Shield; }

struct Unit {
  int id = 0;
  int team = 0;
  Vec2 position;
  double hp = 0.0;
  double hp_max = 0.0;
  double ap = 0.0;
  double ap_max = 0.0;
  std::array<Weapon, 2> weapons{};
  std::vector<Gadget> gadgets;
  bool overwatch_active = false;
  bool shield_active = false;

  bool alive() const { return hp > 0.0; }
  friend bool operator==(const Unit&, const Unit&) = default;
};

struct Mine {
  Vec2 position;
  int team = 0;
  int owner = 0;
  friend bool operator==(const Mine&, const Mine&) = default;
};

enum class FireMode : std::uint8_t { Single, Burst };

struct MoveAction {
  int unit = 0;
  Vec2 dest;
  friend bool operator==(const MoveAction&, const MoveAction&) = default;
};

struct ShootAction {
  int unit = 0;
  int weapon = 0;
  FireMode mode = FireMode::Single;
  double aim_angle = 0.0;  // radians, world frame
  double extra_spread_deg = 0.0;
  friend bool operator==(const ShootAction&, const ShootAction&) = default;
};

struct ReloadAction {
  int unit = 0;
  int weapon = 0;
  friend bool operator==(const ReloadAction&, const ReloadAction&) = default;
};

struct UseGadgetAction {
  int unit = 0;
  int gadget = 0;
  Vec2 target;
  double force = 1.0;
  friend bool operator==(const UseGadgetAction&, const UseGadgetAction&) = default;
};

struct OverwatchAction {
  int unit = 0;
  friend bool operator==(const OverwatchAction&, const OverwatchAction&) = default;
};

struct EndTurnAction {
  friend bool operator==(const EndTurnAction&, const EndTurnAction&) = default;
};

using Action = std::variant<MoveAction, ShootAction, ReloadAction, UseGadgetAction,
                            OverwatchAction, EndTurnAction>;

// Unit addressed by the action, or -1 for EndTurn.
int action_unit(const Action& action);
bool is_offensive(const Action& action, const struct GameState& state);
std::string describe(const Action& action);

enum class EventKind : std::uint8_t {
  Shot,
  Damage,
  ObstacleHit,
  Kill,
  Teleport,
  GrenadeBlast,
  MinePlaced,
  MineTriggered,
  StatusChange,
};

enum class DamageCause : std::uint8_t { None, Weapon, Overwatch, Grenade, Mine };

enum class Status : std::uint8_t { None, OverwatchOn, OverwatchOff, ShieldOn, ShieldOff, Eliminated };

struct Event {
  EventKind kind = EventKind::Shot;
  int source_unit = -1;
  int source_team = -1;
  int target_unit = -1;
  int target_team = -1;
  double amount = 0.0;
  Vec2 position;
  DamageCause cause = DamageCause::None;
  Status status = Status::None;

  friend bool operator==(const Event&, const Event&) = default;
};

using EventList = std::vector<Event>;

const char* event_kind_name(EventKind k);

struct GameRules {
  int max_turns = 60;
  double move_speed = 1.0;  // world units per AP
  double unit_radius = 0.6;
  double unit_hp = 100.0;
  double unit_ap = 10.0;
  double max_throw = 12.0;
  double grenade_radius = 3.0;
  double grenade_damage = 45.0;
  double mine_radius = 1.5;
  double mine_damage = 40.0;
  double shield_factor = 0.5;
  double overwatch_cost = 2.0;
  double reload_cost = 2.0;
  double gadget_cost = 3.0;
  // Consecutive end-of-turn checks a majority must survive: the capture turn
  // plus one full round.
  int domination_hold = 3;
  // Shots fly exactly along the aim direction. Used by planners for
  // look-ahead, never by the match runner.
  bool noiseless_shots = false;

  friend bool operator==(const GameRules&, const GameRules&) = default;
};

enum class OutcomeStatus : std::uint8_t { Ongoing, Win, Draw };
enum class VictoryReason : std::uint8_t { None, Elimination, Domination, TurnLimit, MutualElimination };

struct Outcome {
  OutcomeStatus status = OutcomeStatus::Ongoing;
  int winner = -1;
  VictoryReason reason = VictoryReason::None;

  bool terminal() const { return status != OutcomeStatus::Ongoing; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct ControlState {
  int owner = -1;  // -1 = none
  int hold = 0;    // consecutive end-of-turn checks held by `owner`
  friend bool operator==(const ControlState&, const ControlState&) = default;
};

struct GameState {
  std::shared_ptr<const MapGeometry> map;
  GameRules rules;
  std::vector<Unit> units;
  std::vector<Mine> mines;
  int turn_number = 1;
  int active_player = 0;
  std::vector<ControlState> control;
  Rng rng;
  Outcome outcome;

  const Unit* find_unit(int id) const;
  Unit* find_unit(int id);
  int living_units(int team) const;

  friend bool operator==(const GameState& a, const GameState& b);
};

struct Legality {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Throws Error("map") when the map is invalid, Error("config") when
// units_per_team is outside [1, 4] or exceeds the map's spawn sites.
GameState new_match(std::shared_ptr<const MapGeometry> map, std::uint64_t seed, int units_per_team,
                    const GameRules& rules = {});
GameState new_match(const MapGeometry& map, std::uint64_t seed, int units_per_team,
                    const GameRules& rules = {});

Legality legal(const GameState& state, const Action& action);

// AP the acting unit pays for a legal action. Move cost is clamped to the
// unit's remaining AP so boundary moves land exactly on zero.
double action_cost(const GameState& state, const Action& action);

struct Transition {
  GameState state;
  EventList events;
};

// Pure form: returns the successor. Throws Error("illegal_action") with the
// legality reason; the input is untouched either way.
Transition apply(const GameState& state, const Action& action);

// In-place form with the same observable contract: on rejection the state is
// left unchanged.
EventList apply_in_place(GameState& state, const Action& action);

struct OverwatchTrigger {
  int overwatcher = 0;
  double t = 0.0;  // path parameter of the first point seen in range
  Vec2 point;
};

// Geometric part of overwatch resolution: every enemy overwatcher whose
// range disc and sight line meet the path, ordered by first contact.
std::vector<OverwatchTrigger> overwatch_triggers(const GameState& state, const Unit& mover,
                                                 Vec2 from, Vec2 to);

// Resolves overwatch fire on `mover_id` travelling from→to (up to t_end).
// Each trigger fires one single shot at its contact point and clears its
// overwatch flag. Stops early if the mover dies.
EventList overwatch_interrupts(GameState& state, int mover_id, Vec2 from, Vec2 to,
                               double t_end = 1.0);

Outcome check_victory(const GameState& state);

bool line_of_sight(const MapGeometry& map, Vec2 a, Vec2 b);

// Expected damage of a weapon hit at `dist`: full up to half range, then
// linear falloff to 50% at max range, zero beyond.
double weapon_damage_at(const Weapon& weapon, double dist);

}  // namespace botsense
