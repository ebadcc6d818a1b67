#include "botsense/game.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "botsense/error.h"

namespace botsense {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kMoveTolerance = 1e-9;

Legality reject(std::string reason) { return {false, std::move(reason)}; }

int rounds_for(const Weapon& w, FireMode mode) {
  return mode == FireMode::Single ? 1 : w.burst_rounds;
}

double shot_cost(const Weapon& w, FireMode mode) {
  return mode == FireMode::Single ? w.ap_cost_single : w.ap_cost_burst;
}

void emit_status(EventList& events, const Unit& u, Status s) {
  Event e;
  e.kind = EventKind::StatusChange;
  e.target_unit = u.id;
  e.target_team = u.team;
  e.position = u.position;
  e.status = s;
  events.push_back(e);
}

// Applies raw damage to `target`, emitting Damage (+Kill/Eliminated).
void deal_damage(GameState& state, EventList& events, int source_unit, int source_team,
                 Unit& target, double raw, DamageCause cause) {
  if (!target.alive() || raw <= 0.0) return;
  const double scaled = target.shield_active ? raw * state.rules.shield_factor : raw;
  const double applied = std::min(target.hp, scaled);
  target.hp -= applied;
  if (target.hp <= 1e-12) target.hp = 0.0;
  Event e;
  e.kind = EventKind::Damage;
  e.source_unit = source_unit;
  e.source_team = source_team;
  e.target_unit = target.id;
  e.target_team = target.team;
  e.amount = applied;
  e.position = target.position;
  e.cause = cause;
  events.push_back(e);
  if (!target.alive()) {
    Event k = e;
    k.kind = EventKind::Kill;
    k.amount = 0.0;
    events.push_back(k);
    if (target.overwatch_active) {
      target.overwatch_active = false;
    }
    target.shield_active = false;
    emit_status(events, target, Status::Eliminated);
  }
}

struct RayHit {
  double dist = 0.0;
  int unit_index = -1;  // index into state.units, -1 = obstacle / nothing
  bool obstacle = false;
};

std::optional<RayHit> cast_ray(const GameState& state, int shooter_id, Vec2 origin, double angle,
                               double range) {
  const Vec2 end = origin + direction(angle) * range;
  std::optional<RayHit> best;
  auto consider = [&](double t, int unit_index, bool obstacle) {
    const double d = t * range;
    if (!best || d < best->dist - 1e-12 || (std::abs(d - best->dist) <= 1e-12 && !obstacle)) {
      best = RayHit{d, unit_index, obstacle};
    }
  };
  for (size_t i = 0; i < state.units.size(); ++i) {
    const Unit& u = state.units[i];
    if (!u.alive() || u.id == shooter_id) continue;
    if (auto iv = segment_disc_interval({u.position, state.rules.unit_radius}, origin, end)) {
      consider(iv->first, static_cast<int>(i), false);
    }
  }
  for (const Polygon& poly : state.map->obstacles) {
    if (auto iv = segment_interior_interval(poly, origin, end)) consider(iv->first, -1, true);
  }
  return best;
}

// Fires one round; returns nothing, appends events.
void fire_round(GameState& state, EventList& events, int shooter_index, const Weapon& weapon,
                double aim_angle, double spread_deg, DamageCause cause) {
  const Unit shooter = state.units[shooter_index];
  double angle = aim_angle;
  if (spread_deg > 0.0 && !state.rules.noiseless_shots) {
    angle += standard_normal(state.rng) * spread_deg * kDegToRad;
  }
  Event shot;
  shot.kind = EventKind::Shot;
  shot.source_unit = shooter.id;
  shot.source_team = shooter.team;
  shot.position = shooter.position;
  shot.amount = angle;
  shot.cause = cause;
  events.push_back(shot);

  const auto hit = cast_ray(state, shooter.id, shooter.position, angle, weapon.range);
  if (!hit) return;
  const double dmg = weapon_damage_at(weapon, hit->dist);
  if (hit->obstacle) {
    Event e;
    e.kind = EventKind::ObstacleHit;
    e.source_unit = shooter.id;
    e.source_team = shooter.team;
    e.amount = dmg;
    e.position = shooter.position + direction(angle) * hit->dist;
    e.cause = cause;
    events.push_back(e);
    return;
  }
  deal_damage(state, events, shooter.id, shooter.team, state.units[hit->unit_index], dmg, cause);
}

int unit_index(const GameState& state, int id) {
  for (size_t i = 0; i < state.units.size(); ++i) {
    if (state.units[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

// Weapon used for reaction fire: the first one with rounds loaded.
int overwatch_weapon(const Unit& u) {
  for (int w = 0; w < 2; ++w) {
    if (u.weapons[w].loaded_rounds > 0) return w;
  }
  return -1;
}

void detonate(GameState& state, EventList& events, Vec2 center, double radius, double base,
              int source_unit, int source_team, DamageCause cause, bool falloff) {
  for (Unit& u : state.units) {
    if (!u.alive()) continue;
    const double d = distance(u.position, center);
    if (d > radius) continue;
    const double dmg = falloff ? base * (1.0 - 0.5 * d / radius) : base;
    deal_damage(state, events, source_unit, source_team, u, dmg, cause);
  }
}

void update_control(GameState& state) {
  const MapGeometry& map = *state.map;
  for (size_t c = 0; c < map.control_points.size(); ++c) {
    bool present[2] = {false, false};
    for (const Unit& u : state.units) {
      if (u.alive() && distance(u.position, map.control_points[c].center) <=
                           map.control_points[c].radius) {
        present[u.team] = true;
      }
    }
    ControlState& cs = state.control[c];
    if (present[0] && present[1]) {
      cs = {};
    } else if (present[0] || present[1]) {
      const int team = present[0] ? 0 : 1;
      if (cs.owner == team) ++cs.hold;
      else cs = {team, 1};
    } else if (cs.owner >= 0) {
      ++cs.hold;
    }
  }
}

void resolve_move(GameState& state, EventList& events, int idx, Vec2 dest) {
  const Vec2 from = state.units[idx].position;
  const MapGeometry& map = *state.map;
  const double r_tp = map.teleporter_radius;

  // First teleporter disc entered from outside.
  double t_tp = 2.0;
  Vec2 tp_exit;
  for (const TeleporterPair& pair : map.teleporters) {
    const std::array<std::pair<Vec2, Vec2>, 2> ends = {{{pair.a, pair.b}, {pair.b, pair.a}}};
    for (const auto& [entry, exit] : ends) {
      if (distance(from, entry) <= r_tp) continue;
      if (auto iv = segment_disc_interval({entry, r_tp}, from, dest)) {
        if (iv->first < t_tp) {
          t_tp = iv->first;
          tp_exit = exit;
        }
      }
    }
  }
  // First enemy mine whose trigger disc the path enters.
  double t_mine = 2.0;
  int mine_idx = -1;
  const int team = state.units[idx].team;
  for (size_t m = 0; m < state.mines.size(); ++m) {
    if (state.mines[m].team == team) continue;
    if (auto iv = segment_disc_interval({state.mines[m].position, state.rules.mine_radius}, from,
                                        dest)) {
      if (iv->first < t_mine) {
        t_mine = iv->first;
        mine_idx = static_cast<int>(m);
      }
    }
  }
  const double t_end = std::min({1.0, t_tp, t_mine});

  auto ow = overwatch_interrupts(state, state.units[idx].id, from, dest, t_end);
  events.insert(events.end(), ow.begin(), ow.end());

  Unit& mover = state.units[idx];
  if (!mover.alive()) return;
  if (mine_idx >= 0 && t_mine <= t_end) {
    mover.position = lerp(from, dest, t_mine);
    const Mine mine = state.mines[mine_idx];
    state.mines.erase(state.mines.begin() + mine_idx);
    Event e;
    e.kind = EventKind::MineTriggered;
    e.source_unit = mine.owner;
    e.source_team = mine.team;
    e.target_unit = mover.id;
    e.target_team = mover.team;
    e.position = mine.position;
    e.cause = DamageCause::Mine;
    events.push_back(e);
    detonate(state, events, mine.position, state.rules.mine_radius, state.rules.mine_damage,
             mine.owner, mine.team, DamageCause::Mine, false);
    return;
  }
  if (t_tp <= 1.0) {
    mover.position = tp_exit;
    Event e;
    e.kind = EventKind::Teleport;
    e.source_unit = mover.id;
    e.source_team = mover.team;
    e.target_unit = mover.id;
    e.target_team = mover.team;
    e.position = tp_exit;
    events.push_back(e);
    return;
  }
  mover.position = dest;
}

Legality check_unit(const GameState& state, int id, const Unit*& out) {
  out = state.find_unit(id);
  if (!out) return reject("unknown unit");
  if (!out->alive()) return reject("unit eliminated");
  if (out->team != state.active_player) return reject("not active player's unit");
  return {};
}

}  // namespace

Weapon make_weapon(WeaponKind kind) {
  Weapon w;
  w.kind = kind;
  switch (kind) {
    case WeaponKind::Rifle:
      w.damage = 20.0;
      w.range = 16.0;
      w.ap_cost_single = 3.0;
      w.ap_cost_burst = 5.0;
      w.magazine = 9;
      w.burst_rounds = 3;
      break;
    case WeaponKind::Shotgun:
      w.damage = 40.0;
      w.range = 6.0;
      w.ap_cost_single = 3.0;
      w.ap_cost_burst = 6.0;
      w.magazine = 4;
      w.burst_rounds = 2;
      break;
    case WeaponKind::Sniper:
      w.damage = 45.0;
      w.range = 30.0;
      w.ap_cost_single = 5.0;
      w.ap_cost_burst = 8.0;
      w.magazine = 3;
      w.burst_rounds = 2;
      break;
  }
  w.loaded_rounds = w.magazine;
  w.aim_spread_deg = 0.0;
  return w;
}

const char* weapon_name(WeaponKind kind) {
  switch (kind) {
    case WeaponKind::Rifle: return "rifle";
    case WeaponKind::Shotgun: return "shotgun";
    case WeaponKind::Sniper: return "sniper";
  }
  return "rifle";
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Shot: return "shot";
    case EventKind::Damage: return "damage";
    case EventKind::ObstacleHit: return "obstacle_hit";
    case EventKind::Kill: return "kill";
    case EventKind::Teleport: return "teleport";
    case EventKind::GrenadeBlast: return "grenade_blast";
    case EventKind::MinePlaced: return "mine_placed";
    case EventKind::MineTriggered: return "mine_triggered";
    case EventKind::StatusChange: return "status_change";
  }
  return "shot";
}

double weapon_damage_at(const Weapon& weapon, double dist) {
  if (dist > weapon.range) return 0.0;
  const double half = 0.5 * weapon.range;
  if (dist <= half) return weapon.damage;
  return weapon.damage * (1.0 - 0.5 * (dist - half) / half);
}

int action_unit(const Action& action) {
  return std::visit(
      [](const auto& a) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, EndTurnAction>) return -1;
        else return a.unit;
      },
      action);
}

bool is_offensive(const Action& action, const GameState& state) {
  if (std::holds_alternative<ShootAction>(action)) return true;
  if (const auto* g = std::get_if<UseGadgetAction>(&action)) {
    const Unit* u = state.find_unit(g->unit);
    if (!u || g->gadget < 0 || g->gadget >= static_cast<int>(u->gadgets.size())) return false;
    return u->gadgets[g->gadget].kind == GadgetKind::Grenade;
  }
  return false;
}

std::string describe(const Action& action) {
  std::ostringstream os;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, MoveAction>) {
          os << "move u" << a.unit << " -> (" << a.dest.x << "," << a.dest.y << ")";
        } else if constexpr (std::is_same_v<T, ShootAction>) {
          os << "shoot u" << a.unit << " w" << a.weapon
             << (a.mode == FireMode::Single ? " single" : " burst") << " @" << a.aim_angle;
        } else if constexpr (std::is_same_v<T, ReloadAction>) {
          os << "reload u" << a.unit << " w" << a.weapon;
        } else if constexpr (std::is_same_v<T, UseGadgetAction>) {
          os << "gadget u" << a.unit << " g" << a.gadget << " -> (" << a.target.x << ","
             << a.target.y << ") f=" << a.force;
        } else if constexpr (std::is_same_v<T, OverwatchAction>) {
          os << "overwatch u" << a.unit;
        } else {
          os << "end turn";
        }
      },
      action);
  return os.str();
}

const Unit* GameState::find_unit(int id) const {
  for (const Unit& u : units) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

Unit* GameState::find_unit(int id) {
  for (Unit& u : units) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

int GameState::living_units(int team) const {
  return static_cast<int>(
      std::count_if(units.begin(), units.end(), [&](const Unit& u) { return u.team == team && u.alive(); }));
}

bool operator==(const GameState& a, const GameState& b) {
  const bool maps_equal = a.map == b.map || (a.map && b.map && *a.map == *b.map);
  return maps_equal && a.rules == b.rules && a.units == b.units && a.mines == b.mines &&
         a.turn_number == b.turn_number && a.active_player == b.active_player &&
         a.control == b.control && a.rng == b.rng && a.outcome == b.outcome;
}

GameState new_match(std::shared_ptr<const MapGeometry> map, std::uint64_t seed, int units_per_team,
                    const GameRules& rules) {
  if (!map) throw Error("map", "no map supplied");
  validate_map(*map);
  if (units_per_team < 1 || units_per_team > kMaxUnitsPerTeam) {
    throw Error("config", "units_per_team must be in [1, 4], got " + std::to_string(units_per_team));
  }
  for (int team = 0; team < 2; ++team) {
    if (static_cast<int>(map->spawns[team].size()) < units_per_team) {
      throw Error("map", "map '" + map->id + "' has only " +
                             std::to_string(map->spawns[team].size()) + " spawn sites for team " +
                             std::to_string(team));
    }
  }
  static constexpr std::array<std::array<WeaponKind, 2>, 4> kLoadouts = {{
      {WeaponKind::Rifle, WeaponKind::Shotgun},
      {WeaponKind::Sniper, WeaponKind::Rifle},
      {WeaponKind::Rifle, WeaponKind::Shotgun},
      {WeaponKind::Shotgun, WeaponKind::Sniper},
  }};
  GameState s;
  s.map = std::move(map);
  s.rules = rules;
  s.rng.seed(seed);
  for (int team = 0; team < 2; ++team) {
    for (int i = 0; i < units_per_team; ++i) {
      Unit u;
      u.id = team * kMaxUnitsPerTeam + i;
      u.team = team;
      u.position = s.map->spawns[team][i];
      u.hp = u.hp_max = rules.unit_hp;
      u.ap = u.ap_max = rules.unit_ap;
      u.weapons = {make_weapon(kLoadouts[i][0]), make_weapon(kLoadouts[i][1])};
      u.gadgets = {{GadgetKind::Grenade, 2}, {GadgetKind::Mine, 1}, {GadgetKind::Shield, 1}};
      s.units.push_back(u);
    }
  }
  s.control.assign(s.map->control_points.size(), ControlState{});
  return s;
}

GameState new_match(const MapGeometry& map, std::uint64_t seed, int units_per_team,
                    const GameRules& rules) {
  return new_match(std::make_shared<const MapGeometry>(map), seed, units_per_team, rules);
}

Legality legal(const GameState& state, const Action& action) {
  if (state.outcome.terminal()) return reject("game over");
  if (std::holds_alternative<EndTurnAction>(action)) return {};

  const Unit* u = nullptr;
  if (auto l = check_unit(state, action_unit(action), u); !l) return l;

  if (const auto* m = std::get_if<MoveAction>(&action)) {
    if (!std::isfinite(m->dest.x) || !std::isfinite(m->dest.y) || !state.map->contains(m->dest)) {
      return reject("out of bounds");
    }
    const double len = distance(u->position, m->dest);
    if (len <= 1e-12) return reject("zero-length move");
    if (len > u->ap * state.rules.move_speed + kMoveTolerance) return reject("insufficient AP");
    for (const Polygon& poly : state.map->obstacles) {
      if (segment_crosses_interior(poly, u->position, m->dest)) return reject("path blocked");
    }
    return {};
  }
  if (const auto* s = std::get_if<ShootAction>(&action)) {
    if (s->weapon < 0 || s->weapon > 1) return reject("invalid weapon");
    if (!std::isfinite(s->aim_angle) || s->extra_spread_deg < 0.0) return reject("invalid aim");
    const Weapon& w = u->weapons[s->weapon];
    if (w.loaded_rounds == 0) return reject("empty magazine");
    if (w.loaded_rounds < rounds_for(w, s->mode)) return reject("insufficient rounds");
    if (u->ap < shot_cost(w, s->mode)) return reject("insufficient AP");
    return {};
  }
  if (const auto* r = std::get_if<ReloadAction>(&action)) {
    if (r->weapon < 0 || r->weapon > 1) return reject("invalid weapon");
    if (u->weapons[r->weapon].loaded_rounds >= u->weapons[r->weapon].magazine) {
      return reject("magazine full");
    }
    if (u->ap < state.rules.reload_cost) return reject("insufficient AP");
    return {};
  }
  if (const auto* g = std::get_if<UseGadgetAction>(&action)) {
    if (g->gadget < 0 || g->gadget >= static_cast<int>(u->gadgets.size())) {
      return reject("invalid gadget");
    }
    const Gadget& gd = u->gadgets[g->gadget];
    if (gd.charges <= 0) return reject("no charges");
    if (u->ap < state.rules.gadget_cost) return reject("insufficient AP");
    if (is_throwable(gd.kind)) {
      if (!(g->force > 0.0 && g->force <= 1.0)) return reject("invalid force");
      if (!state.map->contains(g->target)) return reject("out of bounds");
      if (distance(u->position, g->target) > state.rules.max_throw * g->force + kMoveTolerance) {
        return reject("throw too far");
      }
    } else if (u->shield_active) {
      return reject("shield already active");
    }
    return {};
  }
  if (std::holds_alternative<OverwatchAction>(action)) {
    if (u->overwatch_active) return reject("already on overwatch");
    if (u->ap < state.rules.overwatch_cost) return reject("insufficient AP");
    return {};
  }
  return reject("unknown action");
}

double action_cost(const GameState& state, const Action& action) {
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, EndTurnAction>) {
          return 0.0;
        } else {
          const Unit* u = state.find_unit(a.unit);
          if (!u) return 0.0;
          if constexpr (std::is_same_v<T, MoveAction>) {
            return std::min(u->ap, distance(u->position, a.dest) / state.rules.move_speed);
          } else if constexpr (std::is_same_v<T, ShootAction>) {
            return shot_cost(u->weapons[a.weapon], a.mode);
          } else if constexpr (std::is_same_v<T, ReloadAction>) {
            return state.rules.reload_cost;
          } else if constexpr (std::is_same_v<T, UseGadgetAction>) {
            return state.rules.gadget_cost;
          } else {
            return state.rules.overwatch_cost;
          }
        }
      },
      action);
}

std::vector<OverwatchTrigger> overwatch_triggers(const GameState& state, const Unit& mover,
                                                 Vec2 from, Vec2 to) {
  std::vector<OverwatchTrigger> out;
  for (const Unit& w : state.units) {
    if (!w.alive() || !w.overwatch_active || w.team == mover.team) continue;
    const int wi = overwatch_weapon(w);
    if (wi < 0) continue;
    const double range = w.weapons[wi].range;
    const auto iv = segment_disc_interval({w.position, range}, from, to);
    if (!iv) continue;
    // First point of the in-range interval that is also visible; the
    // interval is scanned at a fixed resolution after its entry point.
    constexpr int kSteps = 64;
    for (int k = 0; k <= kSteps; ++k) {
      const double t = iv->first + (iv->second - iv->first) * k / kSteps;
      const Vec2 p = lerp(from, to, t);
      if (line_of_sight(*state.map, w.position, p)) {
        out.push_back({w.id, t, p});
        break;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const OverwatchTrigger& a, const OverwatchTrigger& b) {
    return a.t < b.t;
  });
  return out;
}

EventList overwatch_interrupts(GameState& state, int mover_id, Vec2 from, Vec2 to, double t_end) {
  EventList events;
  const int mi = unit_index(state, mover_id);
  if (mi < 0) return events;
  const auto triggers = overwatch_triggers(state, state.units[mi], from, to);
  const Vec2 saved = state.units[mi].position;
  for (const OverwatchTrigger& trig : triggers) {
    if (trig.t > t_end) break;
    if (!state.units[mi].alive()) break;
    const int wi = unit_index(state, trig.overwatcher);
    Unit& watcher = state.units[wi];
    if (!watcher.alive() || !watcher.overwatch_active) continue;
    const int weapon = overwatch_weapon(watcher);
    if (weapon < 0) continue;
    state.units[mi].position = trig.point;
    watcher.weapons[weapon].loaded_rounds -= 1;
    watcher.overwatch_active = false;
    const Weapon w = watcher.weapons[weapon];
    fire_round(state, events, wi, w, angle_to(watcher.position, trig.point), w.aim_spread_deg,
               DamageCause::Overwatch);
    emit_status(events, state.units[wi], Status::OverwatchOff);
  }
  state.units[mi].position = state.units[mi].alive() ? saved : state.units[mi].position;
  return events;
}

Outcome check_victory(const GameState& state) {
  const int alive0 = state.living_units(0);
  const int alive1 = state.living_units(1);
  if (alive0 == 0 && alive1 == 0) return {OutcomeStatus::Draw, -1, VictoryReason::MutualElimination};
  if (alive1 == 0) return {OutcomeStatus::Win, 0, VictoryReason::Elimination};
  if (alive0 == 0) return {OutcomeStatus::Win, 1, VictoryReason::Elimination};
  const size_t n = state.control.size();
  for (int team = 0; team < 2 && n > 0; ++team) {
    size_t held = 0;
    for (const ControlState& cs : state.control) {
      if (cs.owner == team && cs.hold >= state.rules.domination_hold) ++held;
    }
    if (2 * held > n) return {OutcomeStatus::Win, team, VictoryReason::Domination};
  }
  if (state.turn_number > state.rules.max_turns) return {OutcomeStatus::Draw, -1, VictoryReason::TurnLimit};
  return {};
}

bool line_of_sight(const MapGeometry& map, Vec2 a, Vec2 b) {
  if (a == b) return true;
  for (const Polygon& poly : map.obstacles) {
    if (segment_crosses_interior(poly, a, b)) return false;
  }
  return true;
}

EventList apply_in_place(GameState& state, const Action& action) {
  if (auto l = legal(state, action); !l) {
    throw Error("illegal_action", describe(action) + ": " + l.reason);
  }
  EventList events;
  if (std::holds_alternative<EndTurnAction>(action)) {
    update_control(state);
    state.outcome = check_victory(state);
    if (state.outcome.terminal()) return events;
    if (state.active_player == 1) ++state.turn_number;
    state.active_player = 1 - state.active_player;
    for (Unit& u : state.units) {
      if (u.team != state.active_player || !u.alive()) continue;
      u.ap = u.ap_max;
      if (u.overwatch_active) {
        u.overwatch_active = false;
        emit_status(events, u, Status::OverwatchOff);
      }
      if (u.shield_active) {
        u.shield_active = false;
        emit_status(events, u, Status::ShieldOff);
      }
    }
    state.outcome = check_victory(state);
    return events;
  }

  const int idx = unit_index(state, action_unit(action));
  state.units[idx].ap -= action_cost(state, action);

  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, MoveAction>) {
          resolve_move(state, events, idx, a.dest);
        } else if constexpr (std::is_same_v<T, ShootAction>) {
          Weapon& w = state.units[idx].weapons[a.weapon];
          const int rounds = rounds_for(w, a.mode);
          w.loaded_rounds -= rounds;
          const Weapon snapshot = w;
          for (int r = 0; r < rounds; ++r) {
            fire_round(state, events, idx, snapshot, a.aim_angle,
                       snapshot.aim_spread_deg + a.extra_spread_deg, DamageCause::Weapon);
          }
        } else if constexpr (std::is_same_v<T, ReloadAction>) {
          Weapon& w = state.units[idx].weapons[a.weapon];
          w.loaded_rounds = w.magazine;
        } else if constexpr (std::is_same_v<T, UseGadgetAction>) {
          Unit& u = state.units[idx];
          Gadget& g = u.gadgets[a.gadget];
          g.charges -= 1;
          switch (g.kind) {
            case GadgetKind::Grenade: {
              Event e;
              e.kind = EventKind::GrenadeBlast;
              e.source_unit = u.id;
              e.source_team = u.team;
              e.position = a.target;
              e.cause = DamageCause::Grenade;
              events.push_back(e);
              const int uid = u.id;
              const int team = u.team;
              detonate(state, events, a.target, state.rules.grenade_radius,
                       state.rules.grenade_damage, uid, team, DamageCause::Grenade, true);
              break;
            }
            case GadgetKind::Mine: {
              state.mines.push_back({a.target, u.team, u.id});
              Event e;
              e.kind = EventKind::MinePlaced;
              e.source_unit = u.id;
              e.source_team = u.team;
              e.position = a.target;
              e.cause = DamageCause::Mine;
              events.push_back(e);
              break;
            }
            case GadgetKind::Shield:
              u.shield_active = true;
              emit_status(events, u, Status::ShieldOn);
              break;
          }
        } else if constexpr (std::is_same_v<T, OverwatchAction>) {
          state.units[idx].overwatch_active = true;
          emit_status(events, state.units[idx], Status::OverwatchOn);
        }
      },
      action);

  state.outcome = check_victory(state);
  // Elimination ends the match immediately; domination and the turn limit
  // are only evaluated at turn boundaries.
  if (state.outcome.status != OutcomeStatus::Ongoing &&
      state.outcome.reason != VictoryReason::Elimination &&
      state.outcome.reason != VictoryReason::MutualElimination) {
    state.outcome = {};
  }
  return events;
}

Transition apply(const GameState& state, const Action& action) {
  Transition t{state, {}};
  t.events = apply_in_place(t.state, action);
  return t;
}

}  // namespace botsense
