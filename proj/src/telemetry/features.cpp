#include "botsense/features.h"

#include <algorithm>
#include <cmath>

#include "botsense/error.h"

namespace botsense {

namespace {

constexpr int kStaticChannels = 4;

void check_raster(int R) {
  if (R < kMinRaster) throw Error("feature", "raster size must be >= " + std::to_string(kMinRaster));
}

void check_perspective(int p) {
  if (p != 0 && p != 1) throw Error("feature", "perspective must be 0 or 1");
}

float unit01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

double ratio(double part, double total) { return total > 0.0 ? part / total : 0.0; }

int clamp_index(double v, int R) { return std::clamp(static_cast<int>(std::floor(v)), 0, R - 1); }

void paint_disc(const MapGeometry& map, int R, Vec2 center, double radius, float value, float* out, int stride,
                int channel) {
  const double sx = R / map.width;
  const double sy = R / map.height;
  const int c0 = clamp_index((center.x - radius) * sx, R), c1 = clamp_index((center.x + radius) * sx, R);
  const int r0 = clamp_index((center.y - radius) * sy, R), r1 = clamp_index((center.y + radius) * sy, R);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (distance(pixel_center(map, R, r, c), center) > radius) continue;
      float& px = out[(static_cast<std::size_t>(r) * R + c) * stride + channel];
      px = std::max(px, value);
    }
  }
}

void paint_polygon(const MapGeometry& map, int R, const Polygon& poly, float* out, int channel) {
  double x0 = poly[0].x, x1 = x0, y0 = poly[0].y, y1 = y0;
  for (Vec2 p : poly) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double sx = R / map.width;
  const double sy = R / map.height;
  for (int r = clamp_index(y0 * sy, R); r <= clamp_index(y1 * sy, R); ++r) {
    for (int c = clamp_index(x0 * sx, R); c <= clamp_index(x1 * sx, R); ++c) {
      if (point_in_convex_closed(poly, pixel_center(map, R, r, c))) {
        out[(static_cast<std::size_t>(r) * R + c) * kStaticChannels + channel] = 1.0f;
      }
    }
  }
}

}  // namespace

std::vector<float> render_static(const MapGeometry& map, int R) {
  check_raster(R);
  std::vector<float> out(static_cast<std::size_t>(R) * R * kStaticChannels, 0.0f);
  for (const Polygon& p : map.obstacles) paint_polygon(map, R, p, out.data(), kChanObstacles);
  for (const Polygon& p : map.rooftops) paint_polygon(map, R, p, out.data(), kChanRooftops);
  for (const TeleporterPair& t : map.teleporters) {
    paint_disc(map, R, t.a, map.teleporter_radius, 1.0f, out.data(), kStaticChannels, kChanTeleporters);
    paint_disc(map, R, t.b, map.teleporter_radius, 1.0f, out.data(), kStaticChannels, kChanTeleporters);
  }
  for (const ControlPoint& cp : map.control_points) {
    paint_disc(map, R, cp.center, cp.radius, 1.0f, out.data(), kStaticChannels, kChanControlPoints);
  }
  return out;
}

void render_spatial_into(const std::vector<float>& static_layers, const MapGeometry& map, const StateRecord& record,
                         int perspective, int R, float* out) {
  const std::size_t pixels = static_cast<std::size_t>(R) * R;
  for (std::size_t i = 0; i < pixels; ++i) {
    for (int c = 0; c < kStaticChannels; ++c) out[i * kSpatialChannels + c] = static_layers[i * kStaticChannels + c];
    out[i * kSpatialChannels + kChanFriendly] = 0.0f;
    out[i * kSpatialChannels + kChanEnemy] = 0.0f;
  }
  const double radius = kUnitRasterFraction * map.width;
  for (const UnitSnapshot& u : record.units) {
    if (u.hp <= 0.0) continue;
    const float value = unit01(u.hp / u.hp_max);
    const int channel = u.team == perspective ? kChanFriendly : kChanEnemy;
    paint_disc(map, R, u.position, radius, value, out, kSpatialChannels, channel);
    // Small discs may fall between pixel centres; the host pixel always shows.
    const int r = clamp_index(u.position.y * R / map.height, R);
    const int c = clamp_index(u.position.x * R / map.width, R);
    float& px = out[(static_cast<std::size_t>(r) * R + c) * kSpatialChannels + channel];
    px = std::max(px, value);
  }
}

std::vector<float> render_spatial(const MapGeometry& map, const StateRecord& record, int perspective, int R) {
  check_raster(R);
  check_perspective(perspective);
  std::vector<float> out(static_cast<std::size_t>(R) * R * kSpatialChannels);
  render_spatial_into(render_static(map, R), map, record, perspective, R, out.data());
  return out;
}

ScalarVector scalar_features(const MatchLog& log, std::size_t t, int perspective) {
  check_perspective(perspective);
  if (t >= log.records.size()) {
    throw Error("feature", "record index " + std::to_string(t) + " out of range (" +
                               std::to_string(log.records.size()) + " records)");
  }
  const StateRecord& r = log.records[t];
  const double max_turns = std::max(1, log.header.max_turns);
  ScalarVector out{};
  for (int k = 0; k < 2; ++k) {
    const int player = k == 0 ? perspective : 1 - perspective;
    const PlayerCounters& c = r.counters[player];
    int living = 0;
    for (const UnitSnapshot& u : r.units) living += (u.team == player && u.hp > 0.0) ? 1 : 0;
    float* f = out.data() + k * kScalarsPerPlayer;
    f[kScalarTurn] = unit01(r.turn_number / max_turns);
    f[kScalarDamageDealt] = unit01(c.damage_dealt / kNormalizers.damage);
    f[kScalarDamageReceived] = unit01(c.damage_received / kNormalizers.damage);
    f[kScalarFriendlyFire] = unit01(c.friendly_fire_damage / kNormalizers.damage);
    f[kScalarFriendlyFireRatio] = unit01(ratio(c.friendly_fire_damage, c.damage_dealt));
    f[kScalarGrenadesUsed] = unit01(c.grenades_used / kNormalizers.count);
    f[kScalarGrenadeRatio] = unit01(ratio(c.grenade_damage, c.damage_dealt));
    f[kScalarGadgetsUsed] = unit01(c.gadgets_used / kNormalizers.count);
    f[kScalarStatusChanges] = unit01(c.status_changes / kNormalizers.count);
    f[kScalarLivingUnits] = unit01(living / kNormalizers.count);
  }
  return out;
}

FeatureSequence build_sequence(const MatchLog& log, int perspective, int T, int R) {
  check_perspective(perspective);
  check_raster(R);
  if (T < 1) throw Error("feature", "sequence length must be >= 1");
  if (log.records.empty()) throw Error("feature", "cannot featurize an empty log");

  FeatureSequence seq;
  seq.T = T;
  seq.R = R;
  seq.label = log.header.is_humanized[perspective] ? 1 : 0;
  seq.spatial.assign(static_cast<std::size_t>(T) * R * R * kSpatialChannels, 0.0f);
  seq.scalars.assign(static_cast<std::size_t>(T) * kScalarFeatures, 0.0f);

  const std::size_t L = log.records.size();
  const std::size_t used = std::min<std::size_t>(L, T);
  seq.valid = static_cast<int>(used);
  const std::vector<float> static_layers = render_static(log.header.map, R);
  for (std::size_t k = 0; k < used; ++k) {
    const std::size_t rec = L - used + k;
    const int slot = T - static_cast<int>(used) + static_cast<int>(k);
    render_spatial_into(static_layers, log.header.map, log.records[rec], perspective, R, seq.frame(slot));
    const ScalarVector s = scalar_features(log, rec, perspective);
    std::copy(s.begin(), s.end(), seq.scalars.begin() + static_cast<std::ptrdiff_t>(slot) * kScalarFeatures);
  }
  return seq;
}

}  // namespace botsense
