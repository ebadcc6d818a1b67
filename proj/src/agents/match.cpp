#include "botsense/agents.h"
#include "botsense/error.h"

namespace botsense {

std::string Policy::descriptor() const {
  std::string d = name + "(budget=" + std::to_string(agent.search_budget) + ")";
  if (persona) d += "+" + std::string(archetype_name(persona->archetype));
  return d;
}

MatchLog play_match(std::shared_ptr<const MapGeometry> map, const Policy& policy0, const Policy& policy1,
                    std::uint64_t seed, const MatchOptions& options) {
  const std::array<const Policy*, 2> policies = {&policy0, &policy1};
  for (const Policy* p : policies) {
    p->agent.validate();
    if (p->persona) p->persona->validate();
  }
  if (options.max_actions_per_turn < 1) throw Error("config", "max_actions_per_turn must be >= 1");

  GameState state = new_match(std::move(map), seed, options.units_per_team, options.rules);

  MatchHeader header;
  header.seed = seed;
  for (int p = 0; p < 2; ++p) {
    header.policy[p] = policies[p]->descriptor();
    header.is_humanized[p] = policies[p]->humanized();
  }
  MatchRecorder recorder(state, header);

  std::array<OrderMap, 2> previous;
  std::array<MistakeMemory, 2> memory;
  std::array<Rng, 2> persona_rng = {Rng(mix_seed(seed, 0x1001)), Rng(mix_seed(seed, 0x1002))};

  while (!state.outcome.terminal()) {
    const int player = state.active_player;
    const Policy& policy = *policies[player];

    AgentConfig config = policy.agent;
    config.seed = mix_seed(policy.agent.seed ^ seed, static_cast<std::uint64_t>(state.turn_number) * 2 + player);
    const std::vector<Assignment> orders = assign_orders(state, config, &previous[player]);
    previous[player] = to_order_map(orders);

    std::vector<Action> plan = plan_turn(state, orders, config).actions;
    if (policy.persona) plan = humanize(plan, state, *policy.persona, memory[player], persona_rng[player]);

    int taken = 0;
    for (const Action& a : plan) {
      if (taken >= options.max_actions_per_turn || state.outcome.terminal()) break;
      // Noisy shots can leave the real state off the planned line.
      if (!legal(state, a)) continue;
      const EventList events = apply_in_place(state, a);
      recorder.record(a, events, state);
      ++taken;
    }
    if (state.outcome.terminal()) break;
    const Action end = EndTurnAction{};
    const EventList events = apply_in_place(state, end);
    recorder.record(end, events, state);
  }
  recorder.finish(state.outcome);
  return recorder.take();
}

}  // namespace botsense
