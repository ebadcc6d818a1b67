#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "botsense/agents.h"
#include "botsense/error.h"

namespace botsense {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Vec2 spawn_centroid(const GameState& state, int team) {
  Vec2 c;
  const auto& sp = state.map->spawns[team];
  for (Vec2 p : sp) c = c + p;
  return sp.empty() ? c : c * (1.0 / sp.size());
}

double max_range(const Unit& u) { return std::max(u.weapons[0].range, u.weapons[1].range); }

double exposure(const GameState& state, const Unit& u) {
  int n = 0, total = 0;
  for (const Unit& e : state.units) {
    if (!e.alive() || e.team == u.team) continue;
    ++total;
    if (distance(u.position, e.position) <= max_range(e) && line_of_sight(*state.map, u.position, e.position)) ++n;
  }
  return total ? static_cast<double>(n) / total : 0.0;
}

double visible_enemies(const GameState& state, const Unit& u) {
  int n = 0, total = 0;
  for (const Unit& e : state.units) {
    if (!e.alive() || e.team == u.team) continue;
    ++total;
    if (distance(u.position, e.position) <= max_range(u) && line_of_sight(*state.map, u.position, e.position)) ++n;
  }
  return total ? static_cast<double>(n) / total : 0.0;
}

double team_hp(const GameState& state, int team) {
  double hp = 0.0;
  for (const Unit& u : state.units) {
    if (u.team == team) hp += std::max(0.0, u.hp);
  }
  return hp;
}

// Where a unit wants to stand for an order, and how close is close enough.
struct Goal {
  Vec2 point;
  double stop = 0.0;
  bool moves = true;
};

Goal order_goal(const GameState& state, const Unit& unit, const Order& order) {
  switch (order.kind) {
    case OrderKind::AssaultPoint:
    case OrderKind::DefendPoint:
      return {state.map->control_points[order.target].center, 0.0, true};
    case OrderKind::HuntUnit: {
      const Unit* e = state.find_unit(order.target);
      if (!e || !e->alive()) return {unit.position, 0.0, false};
      return {e->position, 0.6 * max_range(unit), true};
    }
    case OrderKind::SupportAlly: {
      const Unit* a = state.find_unit(order.target);
      if (!a || !a->alive()) return {unit.position, 0.0, false};
      return {a->position, 3.0, true};
    }
    case OrderKind::Retreat:
      return {spawn_centroid(state, unit.team), 0.0, true};
    case OrderKind::HoldOverwatch:
      return {unit.position, 0.0, false};
  }
  return {unit.position, 0.0, false};
}

Vec2 clamp_to_map(const MapGeometry& map, Vec2 p) {
  constexpr double kMargin = 0.5;
  return {std::clamp(p.x, kMargin, map.width - kMargin), std::clamp(p.y, kMargin, map.height - kMargin)};
}

void push_if_legal(const GameState& state, std::vector<Action>& out, Action a) {
  if (!legal(state, a)) return;
  if (std::find(out.begin(), out.end(), a) != out.end()) return;
  out.push_back(std::move(a));
}

void add_moves(const GameState& state, const Unit& unit, Vec2 goal, double stop, double reserve,
               std::vector<Action>& out) {
  const double reach = unit.ap * state.rules.move_speed;
  const double d = distance(unit.position, goal);
  if (d <= stop + 1e-6 || reach <= 1e-6) return;
  const double base = angle_to(unit.position, goal);
  std::vector<double> lengths = {std::min(reach, d - stop)};
  if (reach - reserve > 0.5) lengths.push_back(std::min(reach - reserve, d - stop));
  for (double len : lengths) {
    for (double off : {0.0, kPi / 6, -kPi / 6, kPi / 3, -kPi / 3, kPi / 2, -kPi / 2}) {
      const Vec2 dest = clamp_to_map(*state.map, unit.position + direction(base + off) * len);
      if (distance(dest, unit.position) <= 1e-6) continue;
      push_if_legal(state, out, MoveAction{unit.id, dest});
    }
  }
}

}  // namespace

double order_progress(const GameState& state, int unit_id, const Order& order) {
  const Unit* unit = state.find_unit(unit_id);
  if (!unit || !unit->alive()) return 0.0;
  const double diag = state.map->diagonal();
  switch (order.kind) {
    case OrderKind::AssaultPoint:
    case OrderKind::DefendPoint: {
      const ControlPoint& cp = state.map->control_points[order.target];
      const double d = distance(unit->position, cp.center);
      if (d <= cp.radius) return state.control[order.target].owner == unit->team ? 1.0 : 0.9;
      return 0.8 * clamp01(1.0 - (d - cp.radius) / diag);
    }
    case OrderKind::HuntUnit: {
      const Unit* e = state.find_unit(order.target);
      if (!e || !e->alive()) return 1.0;
      const double d = distance(unit->position, e->position);
      const bool can_fire = d <= max_range(*unit) && line_of_sight(*state.map, unit->position, e->position);
      const double approach = can_fire ? 1.0 : 0.5 * clamp01(1.0 - d / diag);
      return clamp01(0.6 * (1.0 - e->hp / e->hp_max) + 0.4 * approach);
    }
    case OrderKind::SupportAlly: {
      const Unit* a = state.find_unit(order.target);
      if (!a || !a->alive()) return 0.0;
      const double d = distance(unit->position, a->position);
      return d <= 3.0 ? 1.0 : clamp01(1.0 - (d - 3.0) / diag);
    }
    case OrderKind::Retreat: {
      const double d = distance(unit->position, spawn_centroid(state, unit->team));
      return clamp01(0.5 * (1.0 - exposure(state, *unit)) + 0.5 * (1.0 - d / diag));
    }
    case OrderKind::HoldOverwatch: {
      const double seen = visible_enemies(state, *unit);
      return clamp01((unit->overwatch_active ? 0.5 : 0.0) + 0.5 * seen);
    }
  }
  return 0.0;
}

std::vector<Action> candidate_actions(const GameState& state, const Unit& unit, const Order& order) {
  std::vector<Action> out;
  if (!unit.alive() || state.outcome.terminal() || unit.team != state.active_player) return out;

  // Shots at enemies in range and sight, highest expected damage first.
  struct Shot {
    ShootAction action;
    double value;
  };
  std::vector<Shot> shots;
  for (const Unit& e : state.units) {
    if (!e.alive() || e.team == unit.team) continue;
    const double d = distance(unit.position, e.position);
    if (!line_of_sight(*state.map, unit.position, e.position)) continue;
    const bool focus = order.kind == OrderKind::HuntUnit && order.target == e.id;
    for (int w = 0; w < 2; ++w) {
      const Weapon& wp = unit.weapons[w];
      if (d > wp.range) continue;
      for (FireMode mode : {FireMode::Burst, FireMode::Single}) {
        ShootAction s{unit.id, w, mode, angle_to(unit.position, e.position), 0.0};
        if (!legal(state, s)) continue;
        const int rounds = mode == FireMode::Burst ? wp.burst_rounds : 1;
        double v = std::min(e.hp, rounds * weapon_damage_at(wp, d));
        if (focus) v *= 1.5;
        shots.push_back({s, v});
      }
    }
  }
  std::stable_sort(shots.begin(), shots.end(), [](const Shot& a, const Shot& b) { return a.value > b.value; });
  for (const Shot& s : shots) out.push_back(s.action);

  // Grenade at the enemy with the most neighbours inside the blast.
  for (int g = 0; g < static_cast<int>(unit.gadgets.size()); ++g) {
    if (unit.gadgets[g].kind != GadgetKind::Grenade || unit.gadgets[g].charges <= 0) continue;
    for (const Unit& e : state.units) {
      if (!e.alive() || e.team == unit.team) continue;
      if (distance(unit.position, e.position) > state.rules.max_throw) continue;
      if (distance(unit.position, e.position) <= state.rules.grenade_radius) continue;
      push_if_legal(state, out, UseGadgetAction{unit.id, g, e.position, 1.0});
    }
    break;
  }

  if (order.kind == OrderKind::HoldOverwatch) push_if_legal(state, out, OverwatchAction{unit.id});

  const Goal goal = order_goal(state, unit, order);
  if (goal.moves) {
    const double reserve = unit.weapons[0].ap_cost_single;
    add_moves(state, unit, goal.point, goal.stop, reserve, out);
  }

  for (int w = 0; w < 2; ++w) {
    const Weapon& wp = unit.weapons[w];
    if (wp.loaded_rounds * 2 < wp.magazine || wp.loaded_rounds == 0) push_if_legal(state, out, ReloadAction{unit.id, w});
  }

  for (int g = 0; g < static_cast<int>(unit.gadgets.size()); ++g) {
    const Gadget& gd = unit.gadgets[g];
    if (gd.charges <= 0) continue;
    if (gd.kind == GadgetKind::Shield && unit.hp < 0.6 * unit.hp_max && exposure(state, unit) > 0.0) {
      push_if_legal(state, out, UseGadgetAction{unit.id, g, unit.position, 1.0});
    }
    if (gd.kind == GadgetKind::Mine && order.kind == OrderKind::DefendPoint) {
      const ControlPoint& cp = state.map->control_points[order.target];
      if (distance(unit.position, cp.center) <= cp.radius + 2.0) {
        push_if_legal(state, out, UseGadgetAction{unit.id, g, cp.center, 1.0});
      }
    }
  }

  if (order.kind != OrderKind::HoldOverwatch && !unit.overwatch_active && unit.ap <= state.rules.overwatch_cost + 1.0) {
    push_if_legal(state, out, OverwatchAction{unit.id});
  }
  return out;
}

namespace {

struct Evaluator {
  int unit_id;
  int team;
  Order order;
  double enemy_hp0;
  double self_hp0;

  double operator()(const GameState& s) const {
    double v = 0.5 * order_progress(s, unit_id, order);
    if (enemy_hp0 > 0.0) v += 0.5 * (enemy_hp0 - team_hp(s, 1 - team)) / enemy_hp0;
    const Unit* u = s.find_unit(unit_id);
    if (self_hp0 > 0.0 && u) v -= 0.25 * (self_hp0 - std::max(0.0, u->hp)) / self_hp0;
    if (s.outcome.status == OutcomeStatus::Win) v += s.outcome.winner == team ? 1.0 : -1.0;
    return v;
  }
};

struct Node {
  GameState state;
  std::vector<Action> actions;
  double value = 0.0;
  long seq = 0;
};

struct NodeOrder {
  bool operator()(const Node* a, const Node* b) const {
    if (a->value != b->value) return a->value < b->value;
    return a->seq > b->seq;
  }
};

// Best-first search over one unit's action sequence. Returns the actions of
// the best node seen and counts expansions against `budget`.
std::vector<Action> search_unit(const GameState& root, const Assignment& a, int budget, int depth_cap,
                                int& expansions) {
  const int team = root.active_player;
  const Unit* u = root.find_unit(a.unit);
  Evaluator eval{a.unit, team, a.order, team_hp(root, 1 - team), u ? u->hp : 0.0};

  std::vector<std::unique_ptr<Node>> pool;
  std::priority_queue<Node*, std::vector<Node*>, NodeOrder> open;
  long seq = 0;
  pool.push_back(std::make_unique<Node>(Node{root, {}, eval(root), seq++}));
  open.push(pool.back().get());
  const Node* best = pool.back().get();

  int used = 0;
  while (!open.empty() && used < budget) {
    Node* n = open.top();
    open.pop();
    if (static_cast<int>(n->actions.size()) >= depth_cap || n->state.outcome.terminal()) continue;
    const Unit* nu = n->state.find_unit(a.unit);
    if (!nu || !nu->alive()) continue;
    ++used;
    for (const Action& act : candidate_actions(n->state, *nu, a.order)) {
      Transition t = botsense::apply(n->state, act);
      auto child = std::make_unique<Node>();
      child->state = std::move(t.state);
      child->actions = n->actions;
      child->actions.push_back(act);
      child->value = eval(child->state);
      child->seq = seq++;
      if (child->value > best->value) best = child.get();
      open.push(child.get());
      pool.push_back(std::move(child));
    }
  }
  expansions += used;
  return best->actions;
}

}  // namespace

PlanResult plan_turn(const GameState& state, const std::vector<Assignment>& orders, const AgentConfig& config) {
  config.validate();
  PlanResult result;
  if (state.outcome.terminal()) return result;

  GameState sim = state;
  sim.rules.noiseless_shots = true;
  sim.rng.seed(mix_seed(config.seed, static_cast<std::uint64_t>(state.turn_number) * 2 + state.active_player));

  std::vector<Assignment> ordered;
  for (const Assignment& a : orders) {
    const Unit* u = state.find_unit(a.unit);
    if (u && u->alive() && u->team == state.active_player) ordered.push_back(a);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const Assignment& x, const Assignment& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.unit < y.unit;
  });

  if (config.search_budget < static_cast<int>(ordered.size())) {
    result.greedy_fallback = true;
    for (const Assignment& a : ordered) {
      const Unit* u = sim.find_unit(a.unit);
      if (!u || !u->alive() || sim.outcome.terminal()) continue;
      const auto candidates = candidate_actions(sim, *u, a.order);
      if (candidates.empty()) continue;
      apply_in_place(sim, candidates.front());
      result.actions.push_back(candidates.front());
    }
    return result;
  }

  int remaining = config.search_budget;
  for (size_t i = 0; i < ordered.size(); ++i) {
    if (sim.outcome.terminal()) break;
    const int share = remaining / static_cast<int>(ordered.size() - i);
    int used = 0;
    const std::vector<Action> seq = search_unit(sim, ordered[i], share, config.rollout_depth, used);
    remaining -= used;
    result.expansions += used;
    for (const Action& act : seq) {
      apply_in_place(sim, act);
      result.actions.push_back(act);
    }
  }
  if (result.expansions > config.search_budget) throw Error("agent", "planner exceeded its expansion budget");
  return result;
}

}  // namespace botsense
