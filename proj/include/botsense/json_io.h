#pragma once

// JSON conversions shared by map files, match logs and run configs.

#include <json.hpp>

#include "botsense/game.h"
#include "botsense/map.h"

namespace botsense {

using Json = nlohmann::json;

Json to_json(Vec2 v);
Vec2 vec2_from_json(const Json& j);

Json to_json(const MapGeometry& map);
MapGeometry map_from_json(const Json& j);

Json to_json(const Action& action);
Action action_from_json(const Json& j);

Json to_json(const Event& event);
Event event_from_json(const Json& j);

Json to_json(const Outcome& outcome);
Outcome outcome_from_json(const Json& j);

Json to_json(const GameRules& rules);
GameRules rules_from_json(const Json& j);

}  // namespace botsense
