#include <algorithm>
#include <cmath>
#include <limits>

#include "botsense/agents.h"
#include "botsense/error.h"

namespace botsense {

namespace {

constexpr double kNearRadius = 8.0;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double max_range(const Unit& u) { return std::max(u.weapons[0].range, u.weapons[1].range); }

Vec2 spawn_centroid(const GameState& state, int team) {
  Vec2 c;
  const auto& sp = state.map->spawns[team];
  for (Vec2 p : sp) c = c + p;
  return sp.empty() ? c : c * (1.0 / sp.size());
}

std::vector<const Unit*> living(const GameState& state, int team, int exclude_id = -1) {
  std::vector<const Unit*> out;
  for (const Unit& u : state.units) {
    if (u.alive() && u.team == team && u.id != exclude_id) out.push_back(&u);
  }
  return out;
}

Vec2 order_target_position(const GameState& state, const Unit& unit, const Order& order) {
  switch (order.kind) {
    case OrderKind::AssaultPoint:
    case OrderKind::DefendPoint:
      return state.map->control_points[order.target].center;
    case OrderKind::HuntUnit:
    case OrderKind::SupportAlly:
      return state.find_unit(order.target)->position;
    case OrderKind::Retreat:
      return spawn_centroid(state, unit.team);
    case OrderKind::HoldOverwatch:
      return unit.position;
  }
  return unit.position;
}

double fraction_near(const std::vector<const Unit*>& units, Vec2 p, double radius) {
  if (units.empty()) return 0.0;
  int n = 0;
  for (const Unit* u : units) n += distance(u->position, p) <= radius ? 1 : 0;
  return static_cast<double>(n) / units.size();
}

// Fraction of `others` the unit at `p` sees within `range`.
double fraction_visible(const GameState& state, Vec2 p, const std::vector<const Unit*>& others, double range) {
  if (others.empty()) return 0.0;
  int n = 0;
  for (const Unit* o : others) {
    if (distance(p, o->position) <= range && line_of_sight(*state.map, p, o->position)) ++n;
  }
  return static_cast<double>(n) / others.size();
}

// Fraction of enemies that can fire on `u` from where they stand.
double exposure(const GameState& state, const Unit& u, const std::vector<const Unit*>& enemies) {
  if (enemies.empty()) return 0.0;
  int n = 0;
  for (const Unit* e : enemies) {
    if (distance(u.position, e->position) <= max_range(*e) && line_of_sight(*state.map, u.position, e->position)) ++n;
  }
  return static_cast<double>(n) / enemies.size();
}

bool same_target(const Order& a, const Order& b) { return a.kind == b.kind && a.target == b.target && a.target >= 0; }

}  // namespace

const char* order_kind_name(OrderKind k) {
  switch (k) {
    case OrderKind::AssaultPoint: return "assault_point";
    case OrderKind::DefendPoint: return "defend_point";
    case OrderKind::HuntUnit: return "hunt_unit";
    case OrderKind::Retreat: return "retreat";
    case OrderKind::SupportAlly: return "support_ally";
    case OrderKind::HoldOverwatch: return "hold_overwatch";
  }
  return "retreat";
}

const char* consideration_name(Consideration c) {
  static constexpr std::array<const char*, kConsiderationCount> kNames = {
      "distance_to_target", "own_health",    "ally_proximity",      "enemy_density",   "line_of_fire",
      "ammo_fraction",      "ap_sufficiency", "point_urgency",      "threat_exposure", "order_persistence"};
  return kNames[static_cast<size_t>(c)];
}

bool is_exclusive(const Order& order) {
  return order.kind != OrderKind::Retreat && order.kind != OrderKind::HoldOverwatch;
}

void AgentConfig::validate() const {
  bool any = false;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("config", "consideration weights must be finite and >= 0");
    any = any || w > 0.0;
  }
  if (!any) throw Error("config", "at least one consideration weight must be > 0");
  if (search_budget < 1) throw Error("config", "search_budget must be >= 1");
  if (rollout_depth < 1) throw Error("config", "rollout_depth must be >= 1");
}

const char* archetype_name(Archetype a) {
  switch (a) {
    case Archetype::Killer: return "killer";
    case Archetype::Socializer: return "socializer";
    case Archetype::Achiever: return "achiever";
    case Archetype::Explorer: return "explorer";
  }
  return "killer";
}

Archetype archetype_from_name(const std::string& name) {
  for (Archetype a : {Archetype::Killer, Archetype::Socializer, Archetype::Achiever, Archetype::Explorer}) {
    if (name == archetype_name(a)) return a;
  }
  throw Error("config", "unknown archetype '" + name + "'");
}

PersonaConfig PersonaConfig::from_archetype(Archetype a) {
  PersonaConfig p;
  p.archetype = a;
  switch (a) {
    case Archetype::Killer:
      p = {6.0, 0.30, 0.20, 0.85, 0.30, 0.5, a};
      break;
    case Archetype::Socializer:
      p = {7.0, 0.40, 0.20, 0.95, 0.30, 0.6, a};
      break;
    case Archetype::Achiever:
      p = {6.0, 0.35, 0.15, 0.90, 0.25, 0.5, a};
      break;
    case Archetype::Explorer:
      p = {8.0, 0.60, 0.25, 0.85, 0.35, 0.7, a};
      break;
  }
  return p;
}

void PersonaConfig::validate() const {
  auto unit_interval = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("config", std::string(name) + " must be in [0,1]");
  };
  if (!(aim_spread_extra_deg >= 0.0) || !std::isfinite(aim_spread_extra_deg)) {
    throw Error("config", "aim_spread_extra_deg must be >= 0");
  }
  unit_interval(idle_action_rate, "idle_action_rate");
  unit_interval(reaction_skip_rate, "reaction_skip_rate");
  unit_interval(friendly_fire_aversion, "friendly_fire_aversion");
  unit_interval(mistake_rate, "mistake_rate");
  if (!(mistake_memory_decay > 0.0 && mistake_memory_decay <= 1.0)) {
    throw Error("config", "mistake_memory_decay must be in (0,1]");
  }
}

AgentConfig apply_archetype(AgentConfig config, Archetype archetype) {
  auto& w = config.weights;
  auto scale = [&](Consideration c, double f) { w[static_cast<size_t>(c)] *= f; };
  switch (archetype) {
    case Archetype::Killer:
      scale(Consideration::LineOfFire, 1.5);
      scale(Consideration::OwnHealth, 1.3);
      scale(Consideration::ThreatExposure, 0.5);
      break;
    case Archetype::Socializer:
      scale(Consideration::AllyProximity, 2.5);
      break;
    case Archetype::Achiever:
      scale(Consideration::PointUrgency, 2.0);
      break;
    case Archetype::Explorer:
      scale(Consideration::DistanceToTarget, 0.6);
      break;
  }
  return config;
}

std::vector<Order> enumerate_orders(const GameState& state, int team) {
  std::vector<Order> out;
  const int cps = static_cast<int>(state.map->control_points.size());
  for (int c = 0; c < cps; ++c) out.push_back({OrderKind::AssaultPoint, c});
  for (int c = 0; c < cps; ++c) out.push_back({OrderKind::DefendPoint, c});
  for (const Unit* e : living(state, 1 - team)) out.push_back({OrderKind::HuntUnit, e->id});
  out.push_back({OrderKind::Retreat, -1});
  for (const Unit* a : living(state, team)) out.push_back({OrderKind::SupportAlly, a->id});
  out.push_back({OrderKind::HoldOverwatch, -1});
  return out;
}

bool order_feasible(const GameState& state, const Unit& unit, const Order& order) {
  switch (order.kind) {
    case OrderKind::AssaultPoint:
    case OrderKind::DefendPoint:
      return order.target >= 0 && order.target < static_cast<int>(state.map->control_points.size());
    case OrderKind::HuntUnit: {
      const Unit* e = state.find_unit(order.target);
      return e && e->alive() && e->team != unit.team;
    }
    case OrderKind::SupportAlly: {
      const Unit* a = state.find_unit(order.target);
      return a && a->alive() && a->team == unit.team && a->id != unit.id;
    }
    case OrderKind::Retreat:
    case OrderKind::HoldOverwatch:
      return true;
  }
  return false;
}

ConsiderationVector considerations(const GameState& state, const Unit& unit, const Order& order,
                                   const OrderMap& assigned, const OrderMap* previous) {
  ConsiderationVector f{};
  const auto enemies = living(state, 1 - unit.team);
  const auto allies = living(state, unit.team, unit.id);
  const Vec2 tp = order_target_position(state, unit, order);
  const double diag = state.map->diagonal();
  const double d = distance(unit.position, tp);
  const double hp_frac = unit.hp / unit.hp_max;
  const double range = max_range(unit);
  const OrderKind k = order.kind;
  auto at = [&](Consideration c) -> double& { return f[static_cast<size_t>(c)]; };

  at(Consideration::DistanceToTarget) = k == OrderKind::HoldOverwatch ? 0.5 : 1.0 - d / diag;

  if (k == OrderKind::AssaultPoint || k == OrderKind::HuntUnit) at(Consideration::OwnHealth) = hp_frac;
  else if (k == OrderKind::Retreat) at(Consideration::OwnHealth) = 1.0 - hp_frac;
  else at(Consideration::OwnHealth) = 0.5;

  if (!allies.empty()) {
    int n = 0;
    for (const Unit* a : allies) {
      const auto it = assigned.find(a->id);
      const bool coordinated = it != assigned.end() && same_target(it->second, order);
      n += (coordinated || distance(a->position, tp) <= kNearRadius) ? 1 : 0;
    }
    at(Consideration::AllyProximity) = static_cast<double>(n) / allies.size();
  }

  switch (k) {
    case OrderKind::AssaultPoint:
    case OrderKind::HuntUnit:
      at(Consideration::EnemyDensity) = 1.0 - fraction_near(enemies, tp, kNearRadius);
      break;
    case OrderKind::DefendPoint:
    case OrderKind::SupportAlly:
      at(Consideration::EnemyDensity) = fraction_near(enemies, tp, kNearRadius);
      break;
    case OrderKind::Retreat:
      at(Consideration::EnemyDensity) = fraction_near(enemies, unit.position, kNearRadius);
      break;
    case OrderKind::HoldOverwatch:
      at(Consideration::EnemyDensity) = fraction_near(enemies, unit.position, range);
      break;
  }

  const double exposed = exposure(state, unit, enemies);
  switch (k) {
    case OrderKind::HuntUnit: {
      const Unit* e = state.find_unit(order.target);
      const bool los = line_of_sight(*state.map, unit.position, e->position);
      at(Consideration::LineOfFire) = los ? (d <= range ? 1.0 : 0.5) : 0.0;
      break;
    }
    case OrderKind::HoldOverwatch:
      at(Consideration::LineOfFire) = fraction_visible(state, unit.position, enemies, range);
      break;
    case OrderKind::Retreat:
      at(Consideration::LineOfFire) = 1.0 - exposed;
      break;
    default:
      at(Consideration::LineOfFire) = 0.5 * fraction_visible(state, unit.position, enemies, range);
      break;
  }

  int loaded = 0, magazine = 0;
  for (const Weapon& w : unit.weapons) {
    loaded += w.loaded_rounds;
    magazine += w.magazine;
  }
  const double ammo = magazine > 0 ? static_cast<double>(loaded) / magazine : 0.0;
  at(Consideration::AmmoFraction) = k == OrderKind::Retreat ? 1.0 - ammo : ammo;

  double need = 0.0;
  switch (k) {
    case OrderKind::HuntUnit:
      need = std::max(0.0, d - 0.8 * range) / state.rules.move_speed + unit.weapons[0].ap_cost_single;
      break;
    case OrderKind::HoldOverwatch:
      need = state.rules.overwatch_cost;
      break;
    case OrderKind::Retreat:
      need = d / state.rules.move_speed;
      break;
    default:
      need = d / state.rules.move_speed + unit.weapons[0].ap_cost_single;
      break;
  }
  at(Consideration::ApSufficiency) = need <= 1e-12 ? 1.0 : std::min(1.0, unit.ap / need);

  if (k == OrderKind::AssaultPoint || k == OrderKind::DefendPoint) {
    const int owner = state.control[order.target].owner;
    if (k == OrderKind::AssaultPoint) {
      at(Consideration::PointUrgency) = owner == unit.team ? 0.2 : (owner < 0 ? 0.7 : 1.0);
    } else if (owner == unit.team) {
      at(Consideration::PointUrgency) = fraction_near(enemies, tp, kNearRadius) > 0 ? 1.0 : 0.6;
    } else {
      at(Consideration::PointUrgency) = 0.1;
    }
  }

  at(Consideration::ThreatExposure) =
      (k == OrderKind::Retreat || k == OrderKind::HoldOverwatch) ? exposed : 1.0 - exposed;

  if (previous) {
    const auto it = previous->find(unit.id);
    at(Consideration::OrderPersistence) = (it != previous->end() && it->second == order) ? 1.0 : 0.0;
  }

  for (double& v : f) v = clamp01(v);
  return f;
}

std::vector<ScoredOrder> score_orders(const GameState& state, const Unit& unit, const AgentConfig& config,
                                      const OrderMap& assigned, const OrderMap* previous) {
  if (!unit.alive()) throw Error("agent", "cannot score orders for eliminated unit " + std::to_string(unit.id));
  if (unit.team != state.active_player) {
    throw Error("agent", "unit " + std::to_string(unit.id) + " is not owned by the active player");
  }
  std::vector<ScoredOrder> out;
  for (const Order& o : enumerate_orders(state, unit.team)) {
    if (!order_feasible(state, unit, o)) continue;
    ScoredOrder s;
    s.order = o;
    s.factors = considerations(state, unit, o, assigned, previous);
    for (int i = 0; i < kConsiderationCount; ++i) s.score += config.weights[i] * s.factors[i];
    out.push_back(s);
  }
  return out;
}

std::vector<GreedyPick> greedy_assign(
    int unit_count, int option_count,
    const std::function<std::vector<double>(int unit, const std::vector<GreedyPick>& so_far)>& score,
    const std::function<bool(int option)>& exclusive) {
  std::vector<GreedyPick> picks;
  std::vector<bool> unit_done(unit_count, false);
  std::vector<bool> taken(option_count, false);
  for (int step = 0; step < unit_count; ++step) {
    std::optional<GreedyPick> best;
    for (int u = 0; u < unit_count; ++u) {
      if (unit_done[u]) continue;
      const std::vector<double> scores = score(u, picks);
      for (int o = 0; o < option_count && o < static_cast<int>(scores.size()); ++o) {
        if (std::isnan(scores[o]) || (taken[o] && exclusive(o))) continue;
        if (!best || scores[o] > best->score) best = GreedyPick{u, o, scores[o]};
      }
    }
    if (!best) break;  // remaining units have no available option
    unit_done[best->unit] = true;
    taken[best->option] = true;
    picks.push_back(*best);
  }
  return picks;
}

std::vector<Assignment> assign_orders(const GameState& state, const AgentConfig& config, const OrderMap* previous) {
  const int team = state.active_player;
  const auto units = living(state, team);
  if (units.empty()) return {};
  const std::vector<Order> options = enumerate_orders(state, team);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto score = [&](int ui, const std::vector<GreedyPick>& so_far) {
    OrderMap assigned;
    for (const GreedyPick& p : so_far) assigned[units[p.unit]->id] = options[p.option];
    std::vector<double> out(options.size(), nan);
    for (const ScoredOrder& s : score_orders(state, *units[ui], config, assigned, previous)) {
      const auto it = std::find(options.begin(), options.end(), s.order);
      out[it - options.begin()] = s.score;
    }
    return out;
  };
  auto exclusive = [&](int o) { return is_exclusive(options[o]); };

  std::vector<Assignment> out;
  for (const GreedyPick& p : greedy_assign(static_cast<int>(units.size()), static_cast<int>(options.size()), score,
                                           exclusive)) {
    out.push_back({units[p.unit]->id, options[p.option], p.score});
  }
  // Retreat and overwatch are never exhausted, so every unit is covered.
  return out;
}

OrderMap to_order_map(const std::vector<Assignment>& assignments) {
  OrderMap m;
  for (const Assignment& a : assignments) m[a.unit] = a.order;
  return m;
}

}  // namespace botsense
