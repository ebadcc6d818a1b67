#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "botsense/game.h"

namespace botsense {

inline constexpr int kLogSchemaVersion = 1;

struct UnitSnapshot {
  int id = 0;
  int team = 0;
  Vec2 position;
  double hp = 0.0;
  double hp_max = 0.0;
  double ap = 0.0;
  bool overwatch = false;
  friend bool operator==(const UnitSnapshot&, const UnitSnapshot&) = default;
};

// Cumulative per-player totals up to and including a record.
struct PlayerCounters {
  double damage_dealt = 0.0;  // unit damage plus obstacle-absorbed rounds
  double damage_received = 0.0;
  double friendly_fire_damage = 0.0;
  double grenade_damage = 0.0;
  double obstacle_damage = 0.0;
  int grenades_used = 0;
  int gadgets_used = 0;
  int status_changes = 0;
  friend bool operator==(const PlayerCounters&, const PlayerCounters&) = default;
};

// Folds one event list into the running counters. Counters are derived from
// events alone so a log can always be re-accounted from its events.
void accumulate(std::array<PlayerCounters, 2>& counters, const EventList& events);

struct StateRecord {
  int turn_number = 1;
  int active_player = 0;
  std::vector<UnitSnapshot> units;
  std::array<PlayerCounters, 2> counters{};
  std::optional<Action> action;  // empty for the initial record
  EventList events;
  friend bool operator==(const StateRecord&, const StateRecord&) = default;
};

struct MatchHeader {
  int schema_version = kLogSchemaVersion;
  MapGeometry map;
  std::uint64_t seed = 0;
  std::array<std::string, 2> policy;
  std::array<bool, 2> is_humanized{false, false};
  int max_turns = 60;
  Outcome outcome;
  friend bool operator==(const MatchHeader&, const MatchHeader&) = default;
};

// Record 0 is the state before the first action; every later record is the
// state right after one applied action.
struct MatchLog {
  MatchHeader header;
  std::vector<StateRecord> records;
  friend bool operator==(const MatchLog&, const MatchLog&) = default;
};

std::vector<UnitSnapshot> snapshot_units(const GameState& state);

// Builds a MatchLog while a match is played.
class MatchRecorder {
 public:
  MatchRecorder(const GameState& initial, MatchHeader header);

  void record(const Action& action, const EventList& events, const GameState& after);
  void finish(const Outcome& outcome) { log_.header.outcome = outcome; }

  const MatchLog& log() const { return log_; }
  MatchLog take() { return std::move(log_); }

 private:
  MatchLog log_;
};

// Line-delimited JSON: one header line, then one line per record.
std::string serialize_log(const MatchLog& log);
MatchLog parse_log(const std::string& text);

void write_log(const MatchLog& log, const std::string& path);
MatchLog read_log(const std::string& path);

}  // namespace botsense
