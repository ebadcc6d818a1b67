#pragma once

#include <memory>

#include "botsense/game.h"

namespace botsense::testing {

// 40×40 map without obstacles; four spawn sites per side.
inline MapGeometry open_map() {
  MapGeometry m;
  m.id = "open";
  m.width = 40;
  m.height = 40;
  m.spawns[0] = {{5, 5}, {5, 10}, {5, 15}, {5, 20}};
  m.spawns[1] = {{35, 5}, {35, 10}, {35, 15}, {35, 20}};
  return m;
}

inline Polygon box(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

inline void place(GameState& s, int unit_id, Vec2 p) { s.find_unit(unit_id)->position = p; }

inline void kill(GameState& s, int unit_id) { s.find_unit(unit_id)->hp = 0.0; }

}  // namespace botsense::testing
