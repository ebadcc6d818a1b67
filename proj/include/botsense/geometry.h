#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace botsense {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return length(a - b); }
inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + (b - a) * t; }
inline Vec2 direction(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_to(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

// Convex polygon, vertices in either winding order.
using Polygon = std::vector<Vec2>;

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

// Positive when the vertices are counter-clockwise.
double signed_area(const Polygon& poly);

bool is_convex(const Polygon& poly);

// Strict interior test for a convex polygon: boundary points are outside.
bool point_in_convex_interior(const Polygon& poly, Vec2 p);

// Closed test (boundary counts as inside) for a convex polygon.
bool point_in_convex_closed(const Polygon& poly, Vec2 p);

// Open parameter interval (t_enter, t_exit) ⊂ [0,1] over which the segment
// a→b lies strictly inside `poly`. Empty when the segment only touches the
// boundary (grazing a vertex or running along an edge).
std::optional<std::pair<double, double>> segment_interior_interval(const Polygon& poly, Vec2 a,
                                                                   Vec2 b);

inline bool segment_crosses_interior(const Polygon& poly, Vec2 a, Vec2 b) {
  return segment_interior_interval(poly, a, b).has_value();
}

// Parameter interval [t0,t1] ∩ [0,1] over which segment a→b is inside the
// closed disc; nullopt when they do not meet.
std::optional<std::pair<double, double>> segment_disc_interval(const Disc& disc, Vec2 a, Vec2 b);

}  // namespace botsense
