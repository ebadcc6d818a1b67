#include "botsense/map.h"

#include <fstream>
#include <sstream>

#include "botsense/error.h"
#include "botsense/json_io.h"

namespace botsense {

namespace {

void require(bool cond, const MapGeometry& map, const std::string& what) {
  if (!cond) throw Error("map", "map '" + map.id + "': " + what);
}

bool inside(const MapGeometry& map, Vec2 p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && map.contains(p);
}

}  // namespace

void validate_map(const MapGeometry& map) {
  require(map.width > 0 && map.height > 0, map, "width and height must be positive");
  for (size_t i = 0; i < map.obstacles.size(); ++i) {
    const Polygon& poly = map.obstacles[i];
    require(is_convex(poly), map, "obstacle " + std::to_string(i) + " is not a convex polygon");
    for (Vec2 v : poly) require(inside(map, v), map, "obstacle " + std::to_string(i) + " leaves the map");
  }
  for (size_t i = 0; i < map.rooftops.size(); ++i) {
    require(map.rooftops[i].size() >= 3, map, "rooftop " + std::to_string(i) + " has fewer than 3 vertices");
    for (Vec2 v : map.rooftops[i]) {
      require(inside(map, v), map, "rooftop " + std::to_string(i) + " leaves the map");
    }
  }
  require(map.teleporter_radius > 0, map, "teleporter_radius must be positive");
  for (size_t i = 0; i < map.teleporters.size(); ++i) {
    const TeleporterPair& tp = map.teleporters[i];
    require(inside(map, tp.a) && inside(map, tp.b), map, "teleporter pair " + std::to_string(i) + " leaves the map");
    require(distance(tp.a, tp.b) > 2 * map.teleporter_radius, map,
            "teleporter pair " + std::to_string(i) + " endpoints overlap");
    for (size_t j = 0; j < i; ++j) {
      for (Vec2 p : {tp.a, tp.b}) {
        for (Vec2 q : {map.teleporters[j].a, map.teleporters[j].b}) {
          require(distance(p, q) > 2 * map.teleporter_radius, map,
                  "teleporter endpoint shared between pairs " + std::to_string(j) + " and " + std::to_string(i));
        }
      }
    }
  }
  for (size_t i = 0; i < map.control_points.size(); ++i) {
    require(map.control_points[i].radius > 0, map, "control point " + std::to_string(i) + " radius must be > 0");
    require(inside(map, map.control_points[i].center), map, "control point " + std::to_string(i) + " leaves the map");
  }
  for (int team = 0; team < 2; ++team) {
    require(!map.spawns[team].empty(), map, "team " + std::to_string(team) + " has no spawn sites");
    for (Vec2 s : map.spawns[team]) {
      require(inside(map, s), map, "spawn site leaves the map");
      for (const Polygon& poly : map.obstacles) {
        require(!point_in_convex_closed(poly, s), map, "spawn site inside an obstacle");
      }
    }
  }
}

MapGeometry map_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error("map", std::string("map file is not valid JSON: ") + e.what());
  }
  MapGeometry map = map_from_json(j);
  validate_map(map);
  return map;
}

std::string map_to_json_text(const MapGeometry& map) { return to_json(map).dump(2); }

MapGeometry load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open map file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return map_from_json_text(ss.str());
}

void save_map(const MapGeometry& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write map file " + path);
  out << map_to_json_text(map) << "\n";
}

MapGeometry default_arena() {
  auto box = [](double x0, double y0, double x1, double y1) {
    return Polygon{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  };
  MapGeometry m;
  m.id = "arena";
  m.width = 40.0;
  m.height = 40.0;
  // Point-symmetric about (20,20).
  m.obstacles = {box(17, 13, 19, 18), box(21, 22, 23, 27), box(10, 5, 13, 9),
                 box(27, 31, 30, 35), box(10, 30, 13, 34), box(27, 6, 30, 10)};
  m.rooftops = {box(4, 31, 8, 35), box(32, 5, 36, 9)};
  m.teleporters = {{{6, 37}, {34, 3}}};
  m.teleporter_radius = 0.8;
  m.control_points = {{{20, 5}, 2.5}, {{20, 20}, 2.5}, {{20, 35}, 2.5}};
  m.spawns[0] = {{3, 14}, {3, 18}, {3, 22}, {3, 26}};
  m.spawns[1] = {{37, 26}, {37, 22}, {37, 18}, {37, 14}};
  return m;
}

}  // namespace botsense
