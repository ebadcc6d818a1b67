#include "botsense/dataset.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "botsense/error.h"
#include "botsense/json_io.h"
#include "botsense/rng.h"

namespace botsense {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "feature cache assumes a little-endian host");

const char* balance_name(BalancePolicy b) {
  switch (b) {
    case BalancePolicy::None: return "none";
    case BalancePolicy::DownsampleMajority: return "downsample-majority";
    case BalancePolicy::ClassWeights: return "class-weights";
  }
  return "none";
}

BalancePolicy balance_from_name(const std::string& name) {
  for (BalancePolicy b : {BalancePolicy::None, BalancePolicy::DownsampleMajority, BalancePolicy::ClassWeights}) {
    if (name == balance_name(b)) return b;
  }
  throw Error("config", "unknown balance policy '" + name + "'");
}

std::array<double, 2> balanced_class_weights(const std::array<int, 2>& counts) {
  const double n = counts[0] + counts[1];
  std::array<double, 2> w{1.0, 1.0};
  for (int c = 0; c < 2; ++c) {
    if (counts[c] > 0) w[c] = n / (2.0 * counts[c]);
  }
  return w;
}

namespace {

std::array<int, 2> count_classes(const std::vector<ManifestEntry>& entries) {
  std::array<int, 2> counts{};
  for (const ManifestEntry& e : entries) counts[e.label] += 1;
  return counts;
}

}  // namespace

void apply_balance(DatasetManifest& manifest) {
  std::array<int, 2> counts = count_classes(manifest.entries);
  manifest.class_weights = {1.0, 1.0};
  if (manifest.balance != BalancePolicy::None && (counts[0] == 0 || counts[1] == 0)) {
    throw Error("dataset", std::string("balance policy '") + balance_name(manifest.balance) +
                               "' needs both classes (bot=" + std::to_string(counts[0]) +
                               ", human=" + std::to_string(counts[1]) + ")");
  }
  if (manifest.balance == BalancePolicy::DownsampleMajority && counts[0] != counts[1]) {
    const int majority = counts[0] > counts[1] ? 0 : 1;
    const int keep = counts[1 - majority];
    std::vector<size_t> pool;
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].label == majority) pool.push_back(i);
    }
    Rng rng(mix_seed(manifest.seed, 0xba1a));
    for (int i = 0; i < keep; ++i) {
      const size_t j = i + uniform_index(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<bool> selected(manifest.entries.size(), false);
    for (int i = 0; i < keep; ++i) selected[pool[i]] = true;
    std::vector<ManifestEntry> kept;
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].label != majority || selected[i]) kept.push_back(manifest.entries[i]);
    }
    manifest.entries = std::move(kept);
    counts = count_classes(manifest.entries);
  }
  if (manifest.balance == BalancePolicy::ClassWeights) manifest.class_weights = balanced_class_weights(counts);
  manifest.class_counts = counts;
}

DatasetManifest build_dataset(const std::string& log_dir, const DatasetOptions& options) {
  if (options.T < 1) throw Error("config", "T must be >= 1");
  if (options.R < kMinRaster) throw Error("config", "R must be >= " + std::to_string(kMinRaster));
  std::error_code ec;
  if (!fs::is_directory(log_dir, ec)) throw Error("dataset", "log directory not found: " + log_dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(log_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kLogExtension) paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw Error("dataset", "no " + std::string(kLogExtension) + " logs in " + log_dir);

  DatasetManifest m;
  m.T = options.T;
  m.R = options.R;
  m.balance = options.balance;
  m.seed = options.seed;
  for (size_t g = 0; g < paths.size(); ++g) {
    const MatchLog log = read_log(paths[g]);
    if (log.records.empty()) throw Error("dataset", paths[g] + ": log has no records");
    for (int p = 0; p < (options.first_player_only ? 1 : 2); ++p) {
      m.entries.push_back({paths[g], p, log.header.is_humanized[p] ? 1 : 0, static_cast<int>(g)});
    }
  }
  apply_balance(m);
  return m;
}

std::string manifest_to_json_text(const DatasetManifest& m) {
  Json entries = Json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"log", e.log_path}, {"perspective", e.perspective}, {"label", e.label}, {"group", e.group}});
  }
  const Json j = {{"T", m.T},
                  {"R", m.R},
                  {"balance", balance_name(m.balance)},
                  {"seed", m.seed},
                  {"class_counts", {{"bot", m.class_counts[0]}, {"human", m.class_counts[1]}}},
                  {"class_weights", {{"bot", m.class_weights[0]}, {"human", m.class_weights[1]}}},
                  {"normalizers", {{"turn", "max_turns"}, {"damage", kNormalizers.damage}, {"count", kNormalizers.count}}},
                  {"sequences", entries}};
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json_text(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    DatasetManifest m;
    m.T = j.at("T").get<int>();
    m.R = j.at("R").get<int>();
    m.balance = balance_from_name(j.at("balance").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.class_counts = {j.at("class_counts").at("bot").get<int>(), j.at("class_counts").at("human").get<int>()};
    m.class_weights = {j.at("class_weights").at("bot").get<double>(), j.at("class_weights").at("human").get<double>()};
    for (const Json& e : j.at("sequences")) {
      m.entries.push_back({e.at("log").get<std::string>(), e.at("perspective").get<int>(), e.at("label").get<int>(),
                           e.at("group").get<int>()});
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error("schema", std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write manifest " + path);
  out << manifest_to_json_text(manifest);
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json_text(ss.str());
}

std::vector<FeatureSequence> load_sequences(const DatasetManifest& manifest) {
  std::vector<FeatureSequence> out;
  out.reserve(manifest.entries.size());
  std::map<std::string, MatchLog> logs;
  for (const ManifestEntry& e : manifest.entries) {
    auto it = logs.find(e.log_path);
    if (it == logs.end()) it = logs.emplace(e.log_path, read_log(e.log_path)).first;
    FeatureSequence seq = build_sequence(it->second, e.perspective, manifest.T, manifest.R);
    seq.weight = static_cast<float>(manifest.class_weights[seq.label]);
    seq.group = e.group;
    out.push_back(std::move(seq));
  }
  return out;
}

namespace {

constexpr char kCacheMagic[6] = {'B', 'S', 'F', 'C', '1', '\0'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error("io", path + ": truncated feature cache");
  return v;
}

}  // namespace

void write_feature_cache(const std::vector<FeatureSequence>& sequences, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write feature cache " + path);
  out.write(kCacheMagic, sizeof(kCacheMagic));
  const std::int32_t T = sequences.empty() ? 0 : sequences[0].T;
  const std::int32_t R = sequences.empty() ? 0 : sequences[0].R;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sequences.size()));
  put(out, T);
  put(out, R);
  put<std::int32_t>(out, kSpatialChannels);
  put<std::int32_t>(out, kScalarFeatures);
  for (const FeatureSequence& s : sequences) {
    if (s.T != T || s.R != R) throw Error("io", "feature cache needs uniform sequence shapes");
    put<std::int32_t>(out, s.label);
    put<std::int32_t>(out, s.valid);
    put<std::int32_t>(out, s.group);
    put<float>(out, s.weight);
    out.write(reinterpret_cast<const char*>(s.spatial.data()), s.spatial.size() * sizeof(float));
    out.write(reinterpret_cast<const char*>(s.scalars.data()), s.scalars.size() * sizeof(float));
  }
  if (!out) throw Error("io", "failed writing feature cache " + path);
}

std::vector<FeatureSequence> read_feature_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open feature cache " + path);
  char magic[sizeof(kCacheMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw Error("schema", path + ": not a BSFC1 feature cache");
  }
  const auto count = take<std::uint32_t>(in, path);
  const auto T = take<std::int32_t>(in, path);
  const auto R = take<std::int32_t>(in, path);
  const auto C = take<std::int32_t>(in, path);
  const auto S = take<std::int32_t>(in, path);
  if (C != kSpatialChannels || S != kScalarFeatures) throw Error("schema", path + ": unexpected feature shape");
  std::vector<FeatureSequence> out(count);
  for (FeatureSequence& s : out) {
    s.T = T;
    s.R = R;
    s.label = take<std::int32_t>(in, path);
    s.valid = take<std::int32_t>(in, path);
    s.group = take<std::int32_t>(in, path);
    s.weight = take<float>(in, path);
    s.spatial.resize(static_cast<size_t>(T) * R * R * C);
    s.scalars.resize(static_cast<size_t>(T) * S);
    if (!in.read(reinterpret_cast<char*>(s.spatial.data()), s.spatial.size() * sizeof(float)) ||
        !in.read(reinterpret_cast<char*>(s.scalars.data()), s.scalars.size() * sizeof(float))) {
      throw Error("io", path + ": truncated feature cache");
    }
  }
  return out;
}

}  // namespace botsense
