#include <doctest.h>

#include <random>

#include "botsense/game.h"
#include "botsense/geometry.h"

using namespace botsense;

namespace {

// Crossing-number test, strict interior: independent of the Cyrus-Beck and
// half-plane code paths under test.
bool strictly_inside_oracle(const Polygon& poly, Vec2 p) {
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    const bool within = std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
                        std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
    if (std::abs(c) < 1e-12 && within) return false;  // on boundary
  }
  bool in = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    if ((poly[i].y > p.y) != (poly[j].y > p.y) &&
        p.x < (poly[j].x - poly[i].x) * (p.y - poly[i].y) / (poly[j].y - poly[i].y) + poly[i].x) {
      in = !in;
    }
  }
  return in;
}

bool sampled_blocked(const Polygon& poly, Vec2 a, Vec2 b, int samples = 4000) {
  for (int k = 0; k <= samples; ++k) {
    if (strictly_inside_oracle(poly, lerp(a, b, static_cast<double>(k) / samples))) return true;
  }
  return false;
}

MapGeometry map_with(const Polygon& poly) {
  MapGeometry m;
  m.id = "g";
  m.width = 20;
  m.height = 20;
  m.obstacles = {poly};
  return m;
}

}  // namespace

TEST_CASE("convexity and containment") {
  const Polygon sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(is_convex(sq));
  CHECK(is_convex(Polygon{{0, 0}, {0, 2}, {2, 2}, {2, 0}}));  // clockwise
  CHECK_FALSE(is_convex(Polygon{{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}}));
  CHECK(point_in_convex_interior(sq, {1, 1}));
  CHECK_FALSE(point_in_convex_interior(sq, {2, 1}));
  CHECK(point_in_convex_closed(sq, {2, 1}));
}

TEST_CASE("line_of_sight examples") {
  const Polygon sq{{8, 8}, {12, 8}, {12, 12}, {8, 12}};
  const MapGeometry m = map_with(sq);
  SUBCASE("a == b is visible") { CHECK(line_of_sight(m, {3, 3}, {3, 3})); }
  SUBCASE("through interior is blocked") {
    CHECK_FALSE(line_of_sight(m, {2, 10}, {18, 10}));
    CHECK(sampled_blocked(sq, {2, 10}, {18, 10}));
  }
  SUBCASE("grazing a vertex is not blockage") {
    // Diagonal through corner (8,8) only: the line y = -x + 16.
    const Vec2 a{4, 12}, b{12, 4};
    CHECK(line_of_sight(m, a, b));
    CHECK_FALSE(sampled_blocked(sq, a, b));
  }
  SUBCASE("running along an edge is not blockage") {
    CHECK(line_of_sight(m, {8, 2}, {8, 18}));
    CHECK_FALSE(sampled_blocked(sq, {8, 2}, {8, 18}));
  }
}

TEST_CASE("line_of_sight agrees with the sampling oracle and is symmetric") {
  const Polygon tri{{6, 5}, {14, 7}, {9, 14}};
  const MapGeometry m = map_with(tri);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 20);
  int blocked = 0;
  for (int i = 0; i < 400; ++i) {
    const Vec2 a{U(rng), U(rng)}, b{U(rng), U(rng)};
    if (point_in_convex_closed(tri, a) || point_in_convex_closed(tri, b)) continue;
    const bool los = line_of_sight(m, a, b);
    CHECK(los == line_of_sight(m, b, a));
    // Sampling can miss very shallow cuts; only disagreements where the
    // oracle sees an interior point count.
    if (sampled_blocked(tri, a, b)) CHECK_FALSE(los);
    blocked += los ? 0 : 1;
  }
  CHECK(blocked > 20);
}

TEST_CASE("segment-disc interval") {
  const Disc d{{5, 0}, 1};
  auto iv = segment_disc_interval(d, {0, 0}, {10, 0});
  REQUIRE(iv);
  CHECK(iv->first == doctest::Approx(0.4));
  CHECK(iv->second == doctest::Approx(0.6));
  CHECK_FALSE(segment_disc_interval(d, {0, 2}, {10, 2}));
  CHECK_FALSE(segment_disc_interval(d, {0, 0}, {3, 0}));
}
