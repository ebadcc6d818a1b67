#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "botsense/features.h"

namespace botsense {

inline constexpr const char* kLogExtension = ".ttlog";

enum class BalancePolicy : std::uint8_t { None, DownsampleMajority, ClassWeights };
const char* balance_name(BalancePolicy b);
BalancePolicy balance_from_name(const std::string& name);  // throws Error("config")

struct ManifestEntry {
  std::string log_path;
  int perspective = 0;
  int label = 0;
  int group = 0;  // index of the source log
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  int T = 32;
  int R = 64;
  BalancePolicy balance = BalancePolicy::None;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
  std::array<int, 2> class_counts{};      // after balancing
  std::array<double, 2> class_weights{1.0, 1.0};
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

// Weights n / (2 n_c): the per-example mean over the dataset is exactly 1.
std::array<double, 2> balanced_class_weights(const std::array<int, 2>& counts);

struct DatasetOptions {
  int T = 32;
  int R = 64;
  BalancePolicy balance = BalancePolicy::None;
  std::uint64_t seed = 0;
  bool first_player_only = false;
};

// Applies the balance policy to an entry list. Downsampling keeps every
// minority example and a seeded subset of the majority, in source order.
// Throws Error("dataset") when a class is empty under a non-None policy.
void apply_balance(DatasetManifest& manifest);

// Scans `log_dir` for *.ttlog files in name order. Throws Error("dataset")
// on a missing or empty directory.
DatasetManifest build_dataset(const std::string& log_dir, const DatasetOptions& options);

std::string manifest_to_json_text(const DatasetManifest& manifest);
DatasetManifest manifest_from_json_text(const std::string& text);
void write_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

// Materializes every listed sequence with its class weight.
std::vector<FeatureSequence> load_sequences(const DatasetManifest& manifest);

// Binary feature cache: magic "BSFC1", little-endian.
void write_feature_cache(const std::vector<FeatureSequence>& sequences, const std::string& path);
std::vector<FeatureSequence> read_feature_cache(const std::string& path);

}  // namespace botsense
