#include "botsense/match_log.h"

#include <fstream>
#include <sstream>

#include "botsense/error.h"
#include "botsense/json_io.h"

namespace botsense {

namespace {

Json counters_to_json(const PlayerCounters& c) {
  return {{"dealt", c.damage_dealt},         {"received", c.damage_received},
          {"ff", c.friendly_fire_damage},     {"grenade_dmg", c.grenade_damage},
          {"obstacle_dmg", c.obstacle_damage}, {"grenades", c.grenades_used},
          {"gadgets", c.gadgets_used},        {"status", c.status_changes}};
}

PlayerCounters counters_from_json(const Json& j) {
  PlayerCounters c;
  c.damage_dealt = j.at("dealt").get<double>();
  c.damage_received = j.at("received").get<double>();
  c.friendly_fire_damage = j.at("ff").get<double>();
  c.grenade_damage = j.at("grenade_dmg").get<double>();
  c.obstacle_damage = j.at("obstacle_dmg").get<double>();
  c.grenades_used = j.at("grenades").get<int>();
  c.gadgets_used = j.at("gadgets").get<int>();
  c.status_changes = j.at("status").get<int>();
  return c;
}

Json header_to_json(const MatchHeader& h, size_t record_count) {
  return {{"type", "header"},
          {"schema_version", h.schema_version},
          {"map_id", h.map.id},
          {"map", to_json(h.map)},
          {"seed", h.seed},
          {"policy", {h.policy[0], h.policy[1]}},
          {"is_humanized", {h.is_humanized[0], h.is_humanized[1]}},
          {"max_turns", h.max_turns},
          {"record_count", record_count},
          {"outcome", to_json(h.outcome)}};
}

Json record_to_json(const StateRecord& r) {
  Json units = Json::array();
  for (const UnitSnapshot& u : r.units) {
    units.push_back({u.id, u.team, u.position.x, u.position.y, u.hp, u.hp_max, u.ap, u.overwatch});
  }
  Json events = Json::array();
  for (const Event& e : r.events) events.push_back(to_json(e));
  return {{"turn", r.turn_number},
          {"player", r.active_player},
          {"units", units},
          {"counters", {counters_to_json(r.counters[0]), counters_to_json(r.counters[1])}},
          {"action", r.action ? to_json(*r.action) : Json(nullptr)},
          {"events", events}};
}

StateRecord record_from_json(const Json& j) {
  StateRecord r;
  r.turn_number = j.at("turn").get<int>();
  r.active_player = j.at("player").get<int>();
  for (const Json& u : j.at("units")) {
    if (!u.is_array() || u.size() != 8) throw Error("schema", "unit snapshot must have 8 fields");
    r.units.push_back({u[0].get<int>(), u[1].get<int>(), {u[2].get<double>(), u[3].get<double>()},
                       u[4].get<double>(), u[5].get<double>(), u[6].get<double>(), u[7].get<bool>()});
  }
  const Json& c = j.at("counters");
  if (!c.is_array() || c.size() != 2) throw Error("schema", "counters must list two players");
  r.counters = {counters_from_json(c[0]), counters_from_json(c[1])};
  if (!j.at("action").is_null()) r.action = action_from_json(j.at("action"));
  for (const Json& e : j.at("events")) r.events.push_back(event_from_json(e));
  return r;
}

}  // namespace

void accumulate(std::array<PlayerCounters, 2>& counters, const EventList& events) {
  auto valid = [](int team) { return team == 0 || team == 1; };
  for (const Event& e : events) {
    switch (e.kind) {
      case EventKind::Damage:
        if (valid(e.source_team)) {
          PlayerCounters& src = counters[e.source_team];
          src.damage_dealt += e.amount;
          if (e.source_team == e.target_team) src.friendly_fire_damage += e.amount;
          if (e.cause == DamageCause::Grenade) src.grenade_damage += e.amount;
        }
        if (valid(e.target_team)) counters[e.target_team].damage_received += e.amount;
        break;
      case EventKind::ObstacleHit:
        if (valid(e.source_team)) {
          counters[e.source_team].damage_dealt += e.amount;
          counters[e.source_team].obstacle_damage += e.amount;
        }
        break;
      case EventKind::GrenadeBlast:
        if (valid(e.source_team)) {
          counters[e.source_team].grenades_used += 1;
          counters[e.source_team].gadgets_used += 1;
        }
        break;
      case EventKind::MinePlaced:
        if (valid(e.source_team)) counters[e.source_team].gadgets_used += 1;
        break;
      case EventKind::StatusChange:
        if (valid(e.target_team)) {
          counters[e.target_team].status_changes += 1;
          if (e.status == Status::ShieldOn) counters[e.target_team].gadgets_used += 1;
        }
        break;
      default:
        break;
    }
  }
}

std::vector<UnitSnapshot> snapshot_units(const GameState& state) {
  std::vector<UnitSnapshot> out;
  out.reserve(state.units.size());
  for (const Unit& u : state.units) {
    out.push_back({u.id, u.team, u.position, u.hp, u.hp_max, u.ap, u.overwatch_active});
  }
  return out;
}

MatchRecorder::MatchRecorder(const GameState& initial, MatchHeader header) {
  log_.header = std::move(header);
  log_.header.map = *initial.map;
  log_.header.max_turns = initial.rules.max_turns;
  StateRecord r;
  r.turn_number = initial.turn_number;
  r.active_player = initial.active_player;
  r.units = snapshot_units(initial);
  log_.records.push_back(std::move(r));
}

void MatchRecorder::record(const Action& action, const EventList& events, const GameState& after) {
  StateRecord r;
  r.turn_number = after.turn_number;
  r.active_player = after.active_player;
  r.units = snapshot_units(after);
  r.counters = log_.records.back().counters;
  accumulate(r.counters, events);
  r.action = action;
  r.events = events;
  log_.records.push_back(std::move(r));
}

std::string serialize_log(const MatchLog& log) {
  std::string out = header_to_json(log.header, log.records.size()).dump();
  out += '\n';
  for (const StateRecord& r : log.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

MatchLog parse_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error("log", "line " + std::to_string(line_no) + ": " + what);
  };

  MatchLog log;
  size_t expected = 0;
  if (!std::getline(in, line) || line.empty()) {
    line_no = 1;
    throw fail("missing header");
  }
  line_no = 1;
  try {
    const Json h = Json::parse(line);
    if (h.value("type", "") != "header") throw fail("missing header");
    const int version = h.at("schema_version").get<int>();
    if (version != kLogSchemaVersion) {
      throw Error("schema", "log schema_version " + std::to_string(version) + " unsupported (expected " +
                                std::to_string(kLogSchemaVersion) + ")");
    }
    log.header.schema_version = version;
    log.header.map = map_from_json(h.at("map"));
    log.header.seed = h.at("seed").get<std::uint64_t>();
    log.header.policy = {h.at("policy").at(0).get<std::string>(), h.at("policy").at(1).get<std::string>()};
    log.header.is_humanized = {h.at("is_humanized").at(0).get<bool>(), h.at("is_humanized").at(1).get<bool>()};
    log.header.max_turns = h.at("max_turns").get<int>();
    log.header.outcome = outcome_from_json(h.at("outcome"));
    expected = h.at("record_count").get<size_t>();
  } catch (const Json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      log.records.push_back(record_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw fail(std::string("malformed record: ") + e.what());
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  if (log.records.size() != expected) {
    ++line_no;
    throw fail("truncated log: expected " + std::to_string(expected) + " records, found " +
               std::to_string(log.records.size()));
  }
  return log;
}

void write_log(const MatchLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write log " + path);
  out << serialize_log(log);
  if (!out) throw Error("io", "failed writing log " + path);
}

MatchLog read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open log " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_log(ss.str());
  } catch (const Error& e) {
    throw Error(e.category(), path + ": " + e.what());
  }
}

}  // namespace botsense
