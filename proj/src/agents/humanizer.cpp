#include <algorithm>
#include <cmath>
#include <numbers>

#include "botsense/agents.h"

namespace botsense {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<const Unit*> living(const GameState& state, int team) {
  std::vector<const Unit*> out;
  for (const Unit& u : state.units) {
    if (u.alive() && u.team == team) out.push_back(&u);
  }
  return out;
}

const Unit* nearest_enemy(const GameState& state, const Unit& u) {
  const Unit* best = nullptr;
  for (const Unit& e : state.units) {
    if (!e.alive() || e.team == u.team) continue;
    if (!best || distance(u.position, e.position) < distance(u.position, best->position)) best = &e;
  }
  return best;
}

bool damages_ally(const EventList& events, int team) {
  return std::any_of(events.begin(), events.end(), [&](const Event& e) {
    return e.kind == EventKind::Damage && e.source_team == team && e.target_team == team && e.amount > 0.0;
  });
}

// A shot is risky when some ray inside two standard deviations of its
// spread would hit an ally; a grenade when an ally stands near the blast.
bool risks_friendly_fire(const GameState& sim, const Action& a, const EventList& planned_events, int team) {
  if (damages_ally(planned_events, team)) return true;
  if (const auto* g = std::get_if<UseGadgetAction>(&a)) {
    const Unit* u = sim.find_unit(g->unit);
    if (u->gadgets[g->gadget].kind != GadgetKind::Grenade) return false;
    // Allies drift between planning and play; keep a margin around the blast.
    for (const Unit& o : sim.units) {
      if (o.alive() && o.team == team && distance(o.position, g->target) <= sim.rules.grenade_radius + 1.0) return true;
    }
    return false;
  }
  const auto* s = std::get_if<ShootAction>(&a);
  if (!s) return false;
  const Unit* u = sim.find_unit(s->unit);
  const double sigma = (u->weapons[s->weapon].aim_spread_deg + s->extra_spread_deg) * kPi / 180.0;
  if (sigma <= 0.0) return false;
  for (double k : {-2.0, -1.0, 1.0, 2.0}) {
    ShootAction probe = *s;
    probe.aim_angle += k * sigma;
    probe.extra_spread_deg = 0.0;
    GameState copy = sim;
    copy.find_unit(s->unit)->weapons[s->weapon].aim_spread_deg = 0.0;
    if (damages_ally(botsense::apply(copy, probe).events, team)) return true;
  }
  return false;
}

std::optional<Action> roaming_move(const GameState& state, Rng& rng) {
  const auto units = living(state, state.active_player);
  if (units.empty()) return std::nullopt;
  const Unit& u = *units[uniform_index(rng, units.size())];
  const double reach = std::min(3.0, 0.3 * u.ap * state.rules.move_speed);
  if (reach < 0.5) return std::nullopt;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double angle = uniform(rng, -kPi, kPi);
    const double len = uniform(rng, 0.5, reach);
    const Action a = MoveAction{u.id, u.position + direction(angle) * len};
    if (legal(state, a)) return a;
  }
  return std::nullopt;
}

// Short move to the reachable spot seen by the fewest enemies.
std::optional<Action> move_to_cover(const GameState& state, const Unit& u) {
  const double len = std::min(2.0, u.ap * state.rules.move_speed);
  if (len < 0.25) return std::nullopt;
  std::optional<Action> best;
  int best_seen = 1 << 30;
  for (int k = 0; k < 8; ++k) {
    const Vec2 dest = u.position + direction(k * kPi / 4) * len;
    const Action a = MoveAction{u.id, dest};
    if (!legal(state, a)) continue;
    int seen = 0;
    for (const Unit& e : state.units) {
      if (e.alive() && e.team != u.team && line_of_sight(*state.map, e.position, dest)) ++seen;
    }
    if (seen < best_seen) {
      best_seen = seen;
      best = a;
    }
  }
  return best;
}

std::optional<Action> make_mistake(const GameState& state, MistakeClass mistake, Rng& rng) {
  const auto units = living(state, state.active_player);
  if (units.empty()) return std::nullopt;
  const Unit& u = *units[uniform_index(rng, units.size())];
  switch (mistake) {
    case MistakeClass::Overextend: {
      const Unit* e = nearest_enemy(state, u);
      if (!e) return std::nullopt;
      const double len = std::min(distance(u.position, e->position) - 1.0, u.ap * state.rules.move_speed);
      if (len <= 0.5) return std::nullopt;
      const Action a = MoveAction{u.id, u.position + direction(angle_to(u.position, e->position)) * len};
      if (legal(state, a)) return a;
      return std::nullopt;
    }
    case MistakeClass::PrematureReload:
      for (int w = 0; w < 2; ++w) {
        const Action a = ReloadAction{u.id, w};
        if (u.weapons[w].loaded_rounds > 0 && legal(state, a)) return a;
      }
      return std::nullopt;
    case MistakeClass::WastedGrenade:
      for (int g = 0; g < static_cast<int>(u.gadgets.size()); ++g) {
        if (u.gadgets[g].kind != GadgetKind::Grenade) continue;
        // Lob it somewhere no enemy stands.
        for (int attempt = 0; attempt < 4; ++attempt) {
          const Vec2 target = u.position + direction(uniform(rng, -kPi, kPi)) * uniform(rng, 4.0, 8.0);
          bool empty = true;
          for (const Unit& o : state.units) {
            if (o.alive() && distance(o.position, target) <= state.rules.grenade_radius) empty = false;
          }
          const Action a = UseGadgetAction{u.id, g, target, 1.0};
          if (empty && legal(state, a)) return a;
        }
      }
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

const char* mistake_name(MistakeClass m) {
  switch (m) {
    case MistakeClass::Overextend: return "overextend";
    case MistakeClass::PrematureReload: return "premature_reload";
    case MistakeClass::WastedGrenade: return "wasted_grenade";
  }
  return "overextend";
}

double mistake_probability(const PersonaConfig& persona, const MistakeMemory& memory, MistakeClass mistake) {
  return persona.mistake_rate * std::pow(persona.mistake_memory_decay, memory.counts[static_cast<size_t>(mistake)]);
}

std::vector<Action> humanize(const std::vector<Action>& plan, const GameState& state, const PersonaConfig& persona,
                             MistakeMemory& memory, Rng& rng) {
  std::vector<Action> draft = plan;
  const int team = state.active_player;

  if (bernoulli(rng, persona.idle_action_rate)) {
    if (auto idle = roaming_move(state, rng)) draft.insert(draft.begin(), *idle);
  }

  if (bernoulli(rng, persona.reaction_skip_rate)) {
    const auto it = std::find_if(draft.begin(), draft.end(), [&](const Action& a) { return is_offensive(a, state); });
    if (it != draft.end()) draft.erase(it);
  }

  if (persona.aim_spread_extra_deg > 0.0) {
    for (Action& a : draft) {
      if (auto* s = std::get_if<ShootAction>(&a)) s->extra_spread_deg += persona.aim_spread_extra_deg;
    }
  }

  std::optional<MistakeClass> injected;
  if (persona.mistake_rate > 0.0) {
    const auto mistake = static_cast<MistakeClass>(uniform_index(rng, kMistakeClassCount));
    if (bernoulli(rng, mistake_probability(persona, memory, mistake))) {
      if (auto a = make_mistake(state, mistake, rng)) {
        draft.insert(draft.begin(), *a);
        injected = mistake;
      }
    }
  }

  // Replay against a noiseless copy: drop anything that no longer fits and
  // veto friendly fire.
  GameState sim = state;
  sim.rules.noiseless_shots = true;
  std::vector<Action> out;
  bool mistake_kept = false;
  for (size_t i = 0; i < draft.size(); ++i) {
    if (sim.outcome.terminal()) break;
    const Action& a = draft[i];
    if (!legal(sim, a)) continue;
    Transition t = botsense::apply(sim, a);
    if (risks_friendly_fire(sim, a, t.events, team) && bernoulli(rng, persona.friendly_fire_aversion)) {
      const Unit* u = sim.find_unit(action_unit(a));
      if (auto cover = u ? move_to_cover(sim, *u) : std::nullopt) {
        apply_in_place(sim, *cover);
        out.push_back(*cover);
      }
      continue;
    }
    sim = std::move(t.state);
    out.push_back(a);
    if (injected && i == 0) mistake_kept = true;
  }
  if (mistake_kept) memory.counts[static_cast<size_t>(*injected)] += 1;
  return out;
}

}  // namespace botsense
