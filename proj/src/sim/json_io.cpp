#include "botsense/json_io.h"

#include <array>

#include "botsense/error.h"

namespace botsense {

namespace {

template <typename E, size_t N>
const char* enum_name(E value, const std::array<const char*, N>& names) {
  return names.at(static_cast<size_t>(value));
}

template <typename E, size_t N>
E enum_from(const Json& j, const std::array<const char*, N>& names, const char* what) {
  const std::string s = j.get<std::string>();
  for (size_t i = 0; i < N; ++i) {
    if (s == names[i]) return static_cast<E>(i);
  }
  throw Error("schema", std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array<const char*, 9> kEventKinds = {
    "shot", "damage", "obstacle_hit", "kill", "teleport",
    "grenade_blast", "mine_placed", "mine_triggered", "status_change"};
constexpr std::array<const char*, 5> kCauses = {"none", "weapon", "overwatch", "grenade", "mine"};
constexpr std::array<const char*, 6> kStatuses = {"none", "overwatch_on", "overwatch_off",
                                                  "shield_on", "shield_off", "eliminated"};
constexpr std::array<const char*, 3> kOutcomeStatus = {"ongoing", "win", "draw"};
constexpr std::array<const char*, 5> kReasons = {"none", "elimination", "domination", "turn_limit",
                                                 "mutual_elimination"};
constexpr std::array<const char*, 2> kModes = {"single", "burst"};

Json polygons_to_json(const std::vector<Polygon>& polys) {
  Json arr = Json::array();
  for (const Polygon& p : polys) {
    Json verts = Json::array();
    for (Vec2 v : p) verts.push_back(to_json(v));
    arr.push_back(verts);
  }
  return arr;
}

std::vector<Polygon> polygons_from_json(const Json& j) {
  std::vector<Polygon> out;
  for (const Json& verts : j) {
    Polygon p;
    for (const Json& v : verts) p.push_back(vec2_from_json(v));
    out.push_back(std::move(p));
  }
  return out;
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error("schema", std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json to_json(Vec2 v) { return Json::array({v.x, v.y}); }

Vec2 vec2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("schema", "point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const MapGeometry& map) {
  Json tps = Json::array();
  for (const TeleporterPair& tp : map.teleporters) tps.push_back({{"a", to_json(tp.a)}, {"b", to_json(tp.b)}});
  Json cps = Json::array();
  for (const ControlPoint& cp : map.control_points) {
    cps.push_back({{"center", to_json(cp.center)}, {"radius", cp.radius}});
  }
  Json spawns = Json::array();
  for (const auto& team : map.spawns) {
    Json pts = Json::array();
    for (Vec2 p : team) pts.push_back(to_json(p));
    spawns.push_back(pts);
  }
  return {{"schema_version", kMapSchemaVersion},
          {"id", map.id},
          {"width", map.width},
          {"height", map.height},
          {"obstacles", polygons_to_json(map.obstacles)},
          {"rooftops", polygons_to_json(map.rooftops)},
          {"teleporters", tps},
          {"teleporter_radius", map.teleporter_radius},
          {"control_points", cps},
          {"spawns", spawns}};
}

MapGeometry map_from_json(const Json& j) {
  return guarded("map", [&] {
    const int version = j.at("schema_version").get<int>();
    if (version != kMapSchemaVersion) {
      throw Error("schema", "map schema_version " + std::to_string(version) + " unsupported (expected " +
                                std::to_string(kMapSchemaVersion) + ")");
    }
    MapGeometry m;
    m.id = j.at("id").get<std::string>();
    m.width = j.at("width").get<double>();
    m.height = j.at("height").get<double>();
    m.obstacles = polygons_from_json(j.value("obstacles", Json::array()));
    m.rooftops = polygons_from_json(j.value("rooftops", Json::array()));
    for (const Json& tp : j.value("teleporters", Json::array())) {
      m.teleporters.push_back({vec2_from_json(tp.at("a")), vec2_from_json(tp.at("b"))});
    }
    m.teleporter_radius = j.value("teleporter_radius", 0.8);
    for (const Json& cp : j.value("control_points", Json::array())) {
      m.control_points.push_back({vec2_from_json(cp.at("center")), cp.at("radius").get<double>()});
    }
    const Json& spawns = j.at("spawns");
    if (!spawns.is_array() || spawns.size() != 2) throw Error("schema", "spawns must list two teams");
    for (int t = 0; t < 2; ++t) {
      for (const Json& p : spawns[t]) m.spawns[t].push_back(vec2_from_json(p));
    }
    return m;
  });
}

Json to_json(const Action& action) {
  return std::visit(
      [](const auto& a) -> Json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, MoveAction>) {
          return {{"type", "move"}, {"unit", a.unit}, {"dest", to_json(a.dest)}};
        } else if constexpr (std::is_same_v<T, ShootAction>) {
          return {{"type", "shoot"},
                  {"unit", a.unit},
                  {"weapon", a.weapon},
                  {"mode", kModes[static_cast<size_t>(a.mode)]},
                  {"aim", a.aim_angle},
                  {"extra_spread", a.extra_spread_deg}};
        } else if constexpr (std::is_same_v<T, ReloadAction>) {
          return {{"type", "reload"}, {"unit", a.unit}, {"weapon", a.weapon}};
        } else if constexpr (std::is_same_v<T, UseGadgetAction>) {
          return {{"type", "gadget"},
                  {"unit", a.unit},
                  {"gadget", a.gadget},
                  {"target", to_json(a.target)},
                  {"force", a.force}};
        } else if constexpr (std::is_same_v<T, OverwatchAction>) {
          return {{"type", "overwatch"}, {"unit", a.unit}};
        } else {
          return {{"type", "end_turn"}};
        }
      },
      action);
}

Action action_from_json(const Json& j) {
  return guarded("action", [&]() -> Action {
    const std::string type = j.at("type").get<std::string>();
    if (type == "move") return MoveAction{j.at("unit").get<int>(), vec2_from_json(j.at("dest"))};
    if (type == "shoot") {
      return ShootAction{j.at("unit").get<int>(), j.at("weapon").get<int>(),
                         enum_from<FireMode>(j.at("mode"), kModes, "fire mode"),
                         j.at("aim").get<double>(), j.at("extra_spread").get<double>()};
    }
    if (type == "reload") return ReloadAction{j.at("unit").get<int>(), j.at("weapon").get<int>()};
    if (type == "gadget") {
      return UseGadgetAction{j.at("unit").get<int>(), j.at("gadget").get<int>(),
                             vec2_from_json(j.at("target")), j.at("force").get<double>()};
    }
    if (type == "overwatch") return OverwatchAction{j.at("unit").get<int>()};
    if (type == "end_turn") return EndTurnAction{};
    throw Error("schema", "unknown action type '" + type + "'");
  });
}

Json to_json(const Event& e) {
  return {{"k", enum_name(e.kind, kEventKinds)},
          {"su", e.source_unit},
          {"st", e.source_team},
          {"tu", e.target_unit},
          {"tt", e.target_team},
          {"a", e.amount},
          {"p", to_json(e.position)},
          {"c", enum_name(e.cause, kCauses)},
          {"s", enum_name(e.status, kStatuses)}};
}

Event event_from_json(const Json& j) {
  return guarded("event", [&] {
    Event e;
    e.kind = enum_from<EventKind>(j.at("k"), kEventKinds, "event kind");
    e.source_unit = j.at("su").get<int>();
    e.source_team = j.at("st").get<int>();
    e.target_unit = j.at("tu").get<int>();
    e.target_team = j.at("tt").get<int>();
    e.amount = j.at("a").get<double>();
    e.position = vec2_from_json(j.at("p"));
    e.cause = enum_from<DamageCause>(j.at("c"), kCauses, "damage cause");
    e.status = enum_from<Status>(j.at("s"), kStatuses, "status");
    return e;
  });
}

Json to_json(const Outcome& o) {
  return {{"status", enum_name(o.status, kOutcomeStatus)},
          {"winner", o.winner},
          {"reason", enum_name(o.reason, kReasons)}};
}

Outcome outcome_from_json(const Json& j) {
  return guarded("outcome", [&] {
    Outcome o;
    o.status = enum_from<OutcomeStatus>(j.at("status"), kOutcomeStatus, "outcome");
    o.winner = j.at("winner").get<int>();
    o.reason = enum_from<VictoryReason>(j.at("reason"), kReasons, "victory reason");
    return o;
  });
}

Json to_json(const GameRules& r) {
  return {{"max_turns", r.max_turns},         {"move_speed", r.move_speed},
          {"unit_radius", r.unit_radius},     {"unit_hp", r.unit_hp},
          {"unit_ap", r.unit_ap},             {"max_throw", r.max_throw},
          {"grenade_radius", r.grenade_radius}, {"grenade_damage", r.grenade_damage},
          {"mine_radius", r.mine_radius},     {"mine_damage", r.mine_damage},
          {"shield_factor", r.shield_factor}, {"overwatch_cost", r.overwatch_cost},
          {"reload_cost", r.reload_cost},     {"gadget_cost", r.gadget_cost},
          {"domination_hold", r.domination_hold}};
}

GameRules rules_from_json(const Json& j) {
  return guarded("rules", [&] {
    GameRules r;
    r.max_turns = j.value("max_turns", r.max_turns);
    r.move_speed = j.value("move_speed", r.move_speed);
    r.unit_radius = j.value("unit_radius", r.unit_radius);
    r.unit_hp = j.value("unit_hp", r.unit_hp);
    r.unit_ap = j.value("unit_ap", r.unit_ap);
    r.max_throw = j.value("max_throw", r.max_throw);
    r.grenade_radius = j.value("grenade_radius", r.grenade_radius);
    r.grenade_damage = j.value("grenade_damage", r.grenade_damage);
    r.mine_radius = j.value("mine_radius", r.mine_radius);
    r.mine_damage = j.value("mine_damage", r.mine_damage);
    r.shield_factor = j.value("shield_factor", r.shield_factor);
    r.overwatch_cost = j.value("overwatch_cost", r.overwatch_cost);
    r.reload_cost = j.value("reload_cost", r.reload_cost);
    r.gadget_cost = j.value("gadget_cost", r.gadget_cost);
    r.domination_hold = j.value("domination_hold", r.domination_hold);
    return r;
  });
}

}  // namespace botsense
