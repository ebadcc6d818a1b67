#pragma once

#include <array>
#include <string>
#include <vector>

#include "botsense/geometry.h"

namespace botsense {

inline constexpr int kMapSchemaVersion = 1;

struct TeleporterPair {
  Vec2 a;
  Vec2 b;
  friend bool operator==(const TeleporterPair&, const TeleporterPair&) = default;
};

struct ControlPoint {
  Vec2 center;
  double radius = 0.0;
  friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

// Static battlefield. Obstacles block movement and fire; rooftops are drawn
// into the spatial encoding only.
struct MapGeometry {
  std::string id;
  double width = 0.0;
  double height = 0.0;
  std::vector<Polygon> obstacles;
  std::vector<Polygon> rooftops;
  std::vector<TeleporterPair> teleporters;
  double teleporter_radius = 0.8;
  std::vector<ControlPoint> control_points;
  std::array<std::vector<Vec2>, 2> spawns;

  double diagonal() const { return std::hypot(width, height); }
  bool contains(Vec2 p) const { return p.x >= 0 && p.y >= 0 && p.x <= width && p.y <= height; }

  friend bool operator==(const MapGeometry&, const MapGeometry&) = default;
};

// Throws botsense::Error("map", ...) naming the first violated invariant.
void validate_map(const MapGeometry& map);

MapGeometry map_from_json_text(const std::string& text);
std::string map_to_json_text(const MapGeometry& map);
MapGeometry load_map(const std::string& path);
void save_map(const MapGeometry& map, const std::string& path);

// Four-per-side symmetric arena with three control points, a teleporter pair
// and a handful of obstacles. Used by tests and as a fallback map.
MapGeometry default_arena();

}  // namespace botsense
