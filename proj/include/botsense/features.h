#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "botsense/map.h"
#include "botsense/match_log.h"

namespace botsense {

inline constexpr int kSpatialChannels = 6;
inline constexpr int kScalarsPerPlayer = 10;
inline constexpr int kScalarFeatures = 2 * kScalarsPerPlayer;
inline constexpr int kMinRaster = 16;

enum SpatialChannel : int {
  kChanObstacles = 0,
  kChanRooftops = 1,
  kChanTeleporters = 2,
  kChanControlPoints = 3,
  kChanFriendly = 4,
  kChanEnemy = 5,
};

// Per-player scalar slots, in order.
enum ScalarSlot : int {
  kScalarTurn = 0,
  kScalarDamageDealt,
  kScalarDamageReceived,
  kScalarFriendlyFire,
  kScalarFriendlyFireRatio,
  kScalarGrenadesUsed,
  kScalarGrenadeRatio,
  kScalarGadgetsUsed,
  kScalarStatusChanges,
  kScalarLivingUnits,
};

struct Normalizers {
  double damage = 1000.0;
  double count = 20.0;
};
inline constexpr Normalizers kNormalizers{};

// Unit discs are drawn with this radius as a fraction of map width.
inline constexpr double kUnitRasterFraction = 0.015;

// World x maps to columns and world y to rows; pixel (row, col) samples the
// world at its centre.
inline Vec2 pixel_center(const MapGeometry& map, int R, int row, int col) {
  return {(col + 0.5) * map.width / R, (row + 0.5) * map.height / R};
}

// Map-only channels 0..3 as an [R,R,4] raster.
std::vector<float> render_static(const MapGeometry& map, int R);

// Writes an [R,R,6] raster into `out` (R*R*6 floats), reusing precomputed
// static channels from render_static.
void render_spatial_into(const std::vector<float>& static_layers, const MapGeometry& map, const StateRecord& record,
                         int perspective, int R, float* out);

// Throws Error("feature") when R < 16 or perspective is not 0/1.
std::vector<float> render_spatial(const MapGeometry& map, const StateRecord& record, int perspective, int R);

using ScalarVector = std::array<float, kScalarFeatures>;

// Cumulative scalars at record t, perspective player's block first.
// Throws Error("feature") on an out-of-range t.
ScalarVector scalar_features(const MatchLog& log, std::size_t t, int perspective);

struct FeatureSequence {
  int T = 0;
  int R = 0;
  std::vector<float> spatial;  // [T,R,R,6]
  std::vector<float> scalars;  // [T,20]
  int label = 0;               // 1 = humanized
  int valid = 0;               // populated (non-padding) steps at the tail
  float weight = 1.0f;
  int group = 0;  // source match, kept together across folds

  float* frame(int t) { return spatial.data() + static_cast<std::size_t>(t) * R * R * kSpatialChannels; }
  const float* frame(int t) const { return spatial.data() + static_cast<std::size_t>(t) * R * R * kSpatialChannels; }
  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;
};

// Throws Error("feature") for an empty log or invalid T/R/perspective.
FeatureSequence build_sequence(const MatchLog& log, int perspective, int T, int R);

}  // namespace botsense
