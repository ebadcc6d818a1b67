#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "botsense/dataset.h"
#include "botsense/features.h"
#include "botsense/map.h"
#include "botsense/rng.h"

namespace botsense::testing {

struct SyntheticDataset {
  DatasetManifest manifest;
  std::vector<FeatureSequence> sequences;
  std::vector<ScalarVector> summaries;  // final-step scalars, as the baseline sees them
  std::vector<double> weights;
};

struct SyntheticOptions {
  int pairs = 60;  // each pair is one bot-bot and one human-human match
  int T = 8;
  int R = 16;
  std::uint64_t seed = 1;
  // Both matches of a pair share every final cumulative value, so whole-match
  // summaries carry no label information.
  bool matched_summaries = true;
  // Extra final friendly-fire share for humanized players (scalar-visible).
  double human_ff_shift = 0.0;
  // Unit trajectories are drawn from this many shared templates, used
  // equally by both classes.
  int spatial_templates = 4;
};

namespace detail {

// Per-step increments summing to exactly `total`. Bots spread their events
// evenly; humanized players idle early and act in bursts late in the window.
inline std::vector<double> increments(double total, int T, bool human, Rng& rng) {
  std::vector<double> w(T);
  if (human) {
    for (int t = 0; t < T; ++t) w[t] = 0.1 * uniform01(rng) + (2 * t >= T ? uniform(rng, 0.5, 1.5) : 0.0);
  } else {
    for (double& v : w) v = 1.0 + 0.25 * (uniform01(rng) - 0.5);
  }
  double s = 0.0;
  for (double v : w) s += v;
  for (double& v : w) v = total * v / s;
  return w;
}

struct FinalBlock {
  double dealt, received, ff, grenades, gadgets, status;
  int units_lost;
};

inline FinalBlock draw_final(Rng& rng) {
  FinalBlock f;
  f.dealt = uniform(rng, 50.0, 400.0);
  f.received = uniform(rng, 50.0, 400.0);
  f.ff = f.dealt * uniform(rng, 0.0, 0.15);
  f.grenades = std::floor(uniform(rng, 0.0, 6.0));
  f.gadgets = f.grenades + std::floor(uniform(rng, 0.0, 4.0));
  f.status = std::floor(uniform(rng, 2.0, 12.0));
  f.units_lost = static_cast<int>(uniform_index(rng, 4));
  return f;
}

// Fills slots [offset, offset+10) of every step.
inline void fill_block(std::vector<float>& scalars, int T, int offset, const FinalBlock& f, bool human, Rng& rng) {
  const double dn = kNormalizers.damage, cn = kNormalizers.count;
  const std::vector<double> d = increments(f.dealt, T, human, rng);
  const std::vector<double> r = increments(f.received, T, human, rng);
  const std::vector<double> ff = increments(f.ff, T, human, rng);
  const std::vector<double> g = increments(f.grenades, T, human, rng);
  const std::vector<double> gd = increments(f.gadgets - f.grenades, T, human, rng);
  const std::vector<double> st = increments(f.status, T, human, rng);
  std::vector<int> loss_step(f.units_lost);
  for (int& s : loss_step) s = static_cast<int>(uniform_index(rng, T));
  double cd = 0, cr = 0, cf = 0, cg = 0, cgd = 0, cs = 0;
  for (int t = 0; t < T; ++t) {
    cd += d[t];
    cr += r[t];
    cf += ff[t];
    cg += g[t];
    cgd += gd[t];
    cs += st[t];
    if (t == T - 1) {  // exact finals, free of rounding drift
      cd = f.dealt;
      cr = f.received;
      cf = f.ff;
      cg = f.grenades;
      cgd = f.gadgets - f.grenades;
      cs = f.status;
    }
    int living = 4;
    for (int s : loss_step) living -= s <= t;
    float* row = scalars.data() + static_cast<std::size_t>(t) * kScalarFeatures + offset;
    row[kScalarTurn] = static_cast<float>((2.0 + 3.0 * t) / cn);
    row[kScalarDamageDealt] = static_cast<float>(cd / dn);
    row[kScalarDamageReceived] = static_cast<float>(cr / dn);
    row[kScalarFriendlyFire] = static_cast<float>(cf / dn);
    row[kScalarFriendlyFireRatio] = static_cast<float>(cd > 0 ? cf / cd : 0.0);
    row[kScalarGrenadesUsed] = static_cast<float>(cg / cn);
    row[kScalarGrenadeRatio] = static_cast<float>(cg + cgd > 0 ? cg / (cg + cgd) : 0.0);
    row[kScalarGadgetsUsed] = static_cast<float>((cg + cgd) / cn);
    row[kScalarStatusChanges] = static_cast<float>(cs / cn);
    row[kScalarLivingUnits] = static_cast<float>(living / cn);
  }
}

// Map layers plus randomly wandering unit discs; independent of the label.
inline void fill_spatial(FeatureSequence& s, const std::vector<float>& static_layers, Rng& rng) {
  const int R = s.R;
  double pos[2][4][2];
  for (auto& team : pos)
    for (auto& u : team) {
      u[0] = uniform(rng, 0.0, R);
      u[1] = uniform(rng, 0.0, R);
    }
  for (int t = 0; t < s.T; ++t) {
    float* f = s.frame(t);
    for (int p = 0; p < R * R; ++p) {
      for (int c = 0; c < 4; ++c) f[p * kSpatialChannels + c] = static_layers[p * 4 + c];
    }
    for (int team = 0; team < 2; ++team) {
      for (auto& u : pos[team]) {
        u[0] = std::clamp(u[0] + uniform(rng, -1.5, 1.5), 0.0, R - 1e-6);
        u[1] = std::clamp(u[1] + uniform(rng, -1.5, 1.5), 0.0, R - 1e-6);
        const int idx = static_cast<int>(u[1]) * R + static_cast<int>(u[0]);
        f[idx * kSpatialChannels + kChanFriendly + team] = static_cast<float>(uniform(rng, 0.3, 1.0));
      }
    }
  }
}

}  // namespace detail

inline SyntheticDataset synthetic_ordering_dataset(const SyntheticOptions& o) {
  SyntheticDataset out;
  out.manifest.T = o.T;
  out.manifest.R = o.R;
  out.manifest.balance = BalancePolicy::None;
  out.manifest.seed = o.seed;
  const std::vector<float> static_layers = render_static(default_arena(), o.R);
  Rng rng(o.seed);
  std::vector<FeatureSequence> templates(std::max(1, o.spatial_templates));
  for (FeatureSequence& t : templates) {
    t.T = o.T;
    t.R = o.R;
    t.spatial.assign(static_cast<std::size_t>(o.T) * o.R * o.R * kSpatialChannels, 0.0f);
    detail::fill_spatial(t, static_layers, rng);
  }
  int group = 0;
  for (int pair = 0; pair < o.pairs; ++pair) {
    const detail::FinalBlock shared[2] = {detail::draw_final(rng), detail::draw_final(rng)};
    for (int human = 0; human < 2; ++human) {
      detail::FinalBlock finals[2] = {shared[0], shared[1]};
      if (!o.matched_summaries) {
        finals[0] = detail::draw_final(rng);
        finals[1] = detail::draw_final(rng);
      }
      for (detail::FinalBlock& f : finals) {
        if (human) f.ff = std::min(f.dealt, f.ff + o.human_ff_shift * f.dealt);
      }
      for (int perspective = 0; perspective < 2; ++perspective) {
        FeatureSequence s;
        s.T = o.T;
        s.R = o.R;
        s.label = human;
        s.valid = o.T;
        s.group = group;
        s.spatial = templates[(pair * 2 + perspective) % templates.size()].spatial;
        s.scalars.assign(static_cast<std::size_t>(o.T) * kScalarFeatures, 0.0f);
        detail::fill_block(s.scalars, o.T, 0, finals[perspective], human, rng);
        detail::fill_block(s.scalars, o.T, kScalarsPerPlayer, finals[1 - perspective], human, rng);
        ScalarVector summary{};
        std::copy_n(s.scalars.end() - kScalarFeatures, kScalarFeatures, summary.begin());
        out.summaries.push_back(summary);
        out.manifest.entries.push_back({"synthetic_" + std::to_string(group), perspective, human, group});
        out.sequences.push_back(std::move(s));
        out.weights.push_back(1.0);
      }
      ++group;
    }
  }
  out.manifest.class_counts = {o.pairs * 2, o.pairs * 2};
  return out;
}

}  // namespace botsense::testing
