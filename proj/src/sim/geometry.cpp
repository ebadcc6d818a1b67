#include "botsense/geometry.h"

#include <algorithm>

namespace botsense {

namespace {

constexpr double kEps = 1e-12;

// Ensures a counter-clockwise traversal so "inside" is the left side of
// every edge.
int winding(const Polygon& poly) { return signed_area(poly) >= 0.0 ? 1 : -1; }

}  // namespace

double signed_area(const Polygon& poly) {
  double area = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    area += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * area;
}

bool is_convex(const Polygon& poly) {
  if (poly.size() < 3) return false;
  if (std::abs(signed_area(poly)) < kEps) return false;
  int sign = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const Vec2 c = poly[(i + 2) % poly.size()];
    const double z = cross(b - a, c - b);
    if (std::abs(z) < kEps) continue;
    const int s = z > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return sign != 0;
}

bool point_in_convex_interior(const Polygon& poly, Vec2 p) {
  const int w = winding(poly);
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    if (w * cross(b - a, p - a) <= kEps) return false;
  }
  return true;
}

bool point_in_convex_closed(const Polygon& poly, Vec2 p) {
  const int w = winding(poly);
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    if (w * cross(b - a, p - a) < -kEps) return false;
  }
  return true;
}

std::optional<std::pair<double, double>> segment_interior_interval(const Polygon& poly, Vec2 a,
                                                                   Vec2 b) {
  // Cyrus-Beck clipping against the open half-planes of every edge.
  const int w = winding(poly);
  const Vec2 d = b - a;
  double t_enter = 0.0;
  double t_exit = 1.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 e0 = poly[i];
    const Vec2 e1 = poly[(i + 1) % poly.size()];
    const Vec2 edge = e1 - e0;
    // inside ⟺ f(t) = w·cross(edge, a + t·d − e0) > 0
    const double f0 = w * cross(edge, a - e0);
    const double df = w * cross(edge, d);
    const double scale = std::max(1.0, length(edge) * (length(d) + length(a - e0)));
    if (std::abs(df) <= kEps * scale) {
      if (f0 <= kEps * scale) return std::nullopt;
      continue;
    }
    const double t = -f0 / df;
    if (df > 0) t_enter = std::max(t_enter, t);
    else t_exit = std::min(t_exit, t);
    if (t_enter >= t_exit) return std::nullopt;
  }
  if (t_exit - t_enter <= 1e-9) return std::nullopt;
  return std::make_pair(t_enter, t_exit);
}

std::optional<std::pair<double, double>> segment_disc_interval(const Disc& disc, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const Vec2 f = a - disc.center;
  const double qa = dot(d, d);
  const double qb = 2.0 * dot(f, d);
  const double qc = dot(f, f) - disc.radius * disc.radius;
  if (qa < kEps) {
    if (qc <= 0.0) return std::make_pair(0.0, 1.0);
    return std::nullopt;
  }
  const double disc_term = qb * qb - 4.0 * qa * qc;
  if (disc_term < 0.0) return std::nullopt;
  const double root = std::sqrt(disc_term);
  const double t0 = (-qb - root) / (2.0 * qa);
  const double t1 = (-qb + root) / (2.0 * qa);
  if (t1 < 0.0 || t0 > 1.0) return std::nullopt;
  return std::make_pair(std::max(0.0, t0), std::min(1.0, t1));
}

}  // namespace botsense
