#include "botsense/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "botsense/error.h"
#include "botsense/match_log.h"

namespace botsense {

using Json = nlohmann::json;

void CVPlan::validate() const {
  if (k < 2) throw Error("config", "evaluate.plan.folds: must be >= 2");
  if (!(inner_validation >= 0.0 && inner_validation < 1.0)) {
    throw Error("config", "evaluate.plan.inner_validation: must be in [0,1)");
  }
}

Json to_json(const CVPlan& p) { return {{"folds", p.k}, {"seed", p.seed}, {"inner_validation", p.inner_validation}}; }

CVPlan cv_plan_from_json(const Json& j) {
  CVPlan p;
  std::string field;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      field = it.key();
      if (field == "folds") p.k = it->get<int>();
      else if (field == "seed") p.seed = it->get<std::uint64_t>();
      else if (field == "inner_validation") p.inner_validation = it->get<double>();
      else throw Error("config", "evaluate.plan." + field + ": unknown field");
    }
  } catch (const Json::exception& e) {
    throw Error("config", "evaluate.plan." + field + ": " + e.what());
  }
  p.validate();
  return p;
}

namespace {

struct MatchGroup {
  int group = 0;
  std::vector<std::size_t> entries;
  std::array<int, 2> labels{};
};

// Groups in first-appearance order, bucketed by label composition.
std::map<std::array<int, 2>, std::vector<MatchGroup>> strata(const DatasetManifest& m,
                                                            const std::vector<std::size_t>& subset) {
  std::map<int, MatchGroup> by_group;
  std::vector<int> order;
  for (std::size_t i : subset) {
    const ManifestEntry& e = m.entries[i];
    auto [it, fresh] = by_group.try_emplace(e.group);
    if (fresh) {
      it->second.group = e.group;
      order.push_back(e.group);
    }
    it->second.entries.push_back(i);
    ++it->second.labels[e.label == 1];
  }
  std::map<std::array<int, 2>, std::vector<MatchGroup>> out;
  for (int g : order) out[by_group[g].labels].push_back(by_group[g]);
  return out;
}

void shuffle_groups(std::vector<MatchGroup>& groups, Rng& rng) {
  for (std::size_t i = groups.size(); i > 1; --i) std::swap(groups[i - 1], groups[uniform_index(rng, i)]);
}

std::array<int, 2> class_presence(const DatasetManifest& m, const std::vector<std::size_t>& idx) {
  std::array<int, 2> c{};
  for (std::size_t i : idx) ++c[m.entries[i].label == 1];
  return c;
}

}  // namespace

std::vector<int> assign_folds(const DatasetManifest& m, const CVPlan& plan) {
  plan.validate();
  std::vector<std::size_t> all(m.entries.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto buckets = strata(m, all);

  std::array<int, 2> matches_with{};
  for (const auto& [comp, groups] : buckets) {
    for (int c = 0; c < 2; ++c) {
      if (comp[c] > 0) matches_with[c] += static_cast<int>(groups.size());
    }
  }
  for (int c = 0; c < 2; ++c) {
    if (matches_with[c] < plan.k) {
      throw Error("evaluation", std::string("need at least ") + std::to_string(plan.k) + " matches with " +
                                    (c ? "human" : "bot") + " examples for " + std::to_string(plan.k) +
                                    "-fold CV, found " + std::to_string(matches_with[c]));
    }
  }

  Rng rng(mix_seed(plan.seed, 0xf01d));
  std::vector<int> folds(m.entries.size(), -1);
  int next = 0;
  for (auto& [comp, groups] : buckets) {
    shuffle_groups(groups, rng);
    for (const MatchGroup& g : groups) {
      for (std::size_t i : g.entries) folds[i] = next;
      next = (next + 1) % plan.k;
    }
  }

  for (int f = 0; f < plan.k; ++f) {
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      if (folds[i] == f) held.push_back(i);
    }
    const std::array<int, 2> c = class_presence(m, held);
    if (c[0] == 0 || c[1] == 0) {
      throw Error("evaluation", "fold " + std::to_string(f) + " has " + std::to_string(c[0]) + " bot and " +
                                    std::to_string(c[1]) + " human examples; every fold needs both classes");
    }
  }
  return folds;
}

std::string fold_hash(const std::vector<int>& folds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int f : folds) {
    for (int b = 0; b < 4; ++b) {
      h ^= static_cast<std::uint8_t>(static_cast<std::uint32_t>(f) >> (8 * b));
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void aggregate(CVResult& r) {
  const std::size_t n = r.folds.size();
  if (n == 0) throw Error("evaluation", "no folds to aggregate");
  auto fields = [](MetricsReport& m) {
    return std::array<double*, 6>{&m.f1_human, &m.f1_bot, &m.macro_f1, &m.precision_human, &m.recall_human, &m.accuracy};
  };
  r.mean = MetricsReport{};
  r.stddev = MetricsReport{};
  auto mean = fields(r.mean);
  auto sd = fields(r.stddev);
  for (FoldResult& f : r.folds) {
    auto v = fields(f.metrics);
    for (int i = 0; i < 6; ++i) *mean[i] += *v[i];
  }
  for (int i = 0; i < 6; ++i) *mean[i] /= static_cast<double>(n);
  if (n > 1) {
    for (FoldResult& f : r.folds) {
      auto v = fields(f.metrics);
      for (int i = 0; i < 6; ++i) *sd[i] += (*v[i] - *mean[i]) * (*v[i] - *mean[i]);
    }
    for (int i = 0; i < 6; ++i) *sd[i] = std::sqrt(*sd[i] / static_cast<double>(n - 1));
  }
}

namespace {

// Splits training entries into fit and early-stopping sets by match.
void inner_split(const DatasetManifest& m, const std::vector<std::size_t>& train, double fraction, std::uint64_t seed,
                 std::vector<std::size_t>& fit, std::vector<std::size_t>& val) {
  fit = train;
  val.clear();
  if (fraction <= 0.0) return;
  auto buckets = strata(m, train);
  Rng rng(seed);
  std::vector<char> held(m.entries.size(), 0);
  for (auto& [comp, groups] : buckets) {
    shuffle_groups(groups, rng);
    const std::size_t take = static_cast<std::size_t>(std::lround(fraction * groups.size()));
    for (std::size_t g = 0; g < take && g + 1 < groups.size(); ++g) {
      for (std::size_t i : groups[g].entries) held[i] = 1;
    }
  }
  std::vector<std::size_t> f2, v2;
  for (std::size_t i : train) (held[i] ? v2 : f2).push_back(i);
  const std::array<int, 2> cv = class_presence(m, v2), cf = class_presence(m, f2);
  if (cv[0] == 0 || cv[1] == 0 || cf[0] == 0 || cf[1] == 0) return;
  fit = std::move(f2);
  val = std::move(v2);
}

template <typename Fn>
void run_parallel(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::vector<std::size_t>> fold_members(const std::vector<int>& folds, int k) {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < folds.size(); ++i) out[folds[i]].push_back(i);
  return out;
}

}  // namespace

CVResult cross_validate(const DatasetManifest& manifest, const std::vector<FeatureSequence>& sequences,
                        const ModelConfig& config, const CVPlan& plan, const EvalOptions& options) {
  if (sequences.size() != manifest.entries.size()) {
    throw Error("evaluation", "sequence count " + std::to_string(sequences.size()) + " does not match manifest (" +
                                  std::to_string(manifest.entries.size()) + ")");
  }
  config.validate();
  const std::vector<int> folds = assign_folds(manifest, plan);
  const auto members = fold_members(folds, plan.k);
  CVResult result;
  result.model = variant_name(config.variant);
  result.fold_hash = fold_hash(folds);
  result.folds.resize(plan.k);
  std::mutex log_mutex;

  run_parallel(plan.k, options.jobs, [&](int f) {
    std::vector<std::size_t> train_idx;
    for (int g = 0; g < plan.k; ++g) {
      if (g != f) train_idx.insert(train_idx.end(), members[g].begin(), members[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::vector<std::size_t> fit_idx, val_idx;
    inner_split(manifest, train_idx, plan.inner_validation, mix_seed(plan.seed, 0x1a00 + f), fit_idx, val_idx);

    std::vector<FeatureSequence> fit, val, held;
    for (std::size_t i : fit_idx) fit.push_back(sequences[i]);
    for (std::size_t i : val_idx) val.push_back(sequences[i]);
    for (std::size_t i : members[f]) held.push_back(sequences[i]);

    ModelConfig fold_config = config;
    fold_config.seed = mix_seed(config.seed, 0xf000 + f);
    Model<float> model(fold_config);
    std::string ckpt;
    if (!options.checkpoint_dir.empty()) {
      ckpt = (std::filesystem::path(options.checkpoint_dir) /
              (std::string(variant_name(config.variant)) + "_fold" + std::to_string(f) + ".bsnn"))
                 .string();
    }
    FoldResult& r = result.folds[f];
    r.fold = f;
    r.train = train(model, fit, val, ckpt);
    r.n_train = train_idx.size();
    r.n_eval = held.size();
    std::vector<int> labels;
    for (const FeatureSequence& s : held) labels.push_back(s.label);
    r.counts = confusion(model.predict(held), labels);
    r.metrics = metrics(r.counts);
    if (options.log) {
      std::lock_guard<std::mutex> lock(log_mutex);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s fold %d: train=%zu eval=%zu epochs=%zu macro_f1=%.4f", result.model.c_str(), f,
                    r.n_train, r.n_eval, r.train.epochs.size(), r.metrics.macro_f1);
      options.log(buf);
    }
  });
  aggregate(result);
  return result;
}

AblationResult run_ablation(const DatasetManifest& manifest, const std::vector<FeatureSequence>& sequences,
                            const ModelConfig& base, const CVPlan& plan, const EvalOptions& options) {
  AblationResult out;
  for (Variant v : {Variant::Full, Variant::RnnOnly, Variant::CnnOnly}) {
    ModelConfig c = base;
    c.variant = v;
    out.rows.push_back(cross_validate(manifest, sequences, c, plan, options));
    out.log.push_back(std::string("fold-hash ") + variant_name(v) + " " + out.rows.back().fold_hash);
  }
  for (const CVResult& r : out.rows) {
    if (r.fold_hash != out.rows.front().fold_hash) throw Error("evaluation", "ablation rows used different folds");
  }
  return out;
}

void LogisticBaseline::fit(const std::vector<ScalarVector>& x, const std::vector<int>& labels,
                           const std::vector<double>& sample_weights, const BaselineConfig& config) {
  const std::size_t n = x.size();
  if (n == 0 || labels.size() != n || sample_weights.size() != n) {
    throw Error("evaluation", "baseline fit needs matching non-empty inputs");
  }
  for (int k = 0; k < kScalarFeatures; ++k) {
    double mu = 0.0, var = 0.0;
    for (const ScalarVector& v : x) mu += v[k];
    mu /= static_cast<double>(n);
    for (const ScalarVector& v : x) var += (v[k] - mu) * (v[k] - mu);
    var /= static_cast<double>(n);
    mean[k] = static_cast<float>(mu);
    scale[k] = static_cast<float>(var > 1e-12 ? std::sqrt(var) : 1.0);
  }
  std::vector<std::array<double, kScalarFeatures>> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < kScalarFeatures; ++k) z[i][k] = (x[i][k] - mean[k]) / scale[k];
  }
  weights.fill(0.0);
  bias = 0.0;
  for (int it = 0; it < config.iterations; ++it) {
    std::array<double, kScalarFeatures> gw{};
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = bias;
      for (int k = 0; k < kScalarFeatures; ++k) s += weights[k] * z[i][k];
      const double p = 1.0 / (1.0 + std::exp(-s));
      const double d = sample_weights[i] * (p - labels[i]) / static_cast<double>(n);
      for (int k = 0; k < kScalarFeatures; ++k) gw[k] += d * z[i][k];
      gb += d;
    }
    for (int k = 0; k < kScalarFeatures; ++k) weights[k] -= config.lr * gw[k];
    bias -= config.lr * gb;
  }
}

double LogisticBaseline::predict(const ScalarVector& x) const {
  double s = bias;
  for (int k = 0; k < kScalarFeatures; ++k) s += weights[k] * (x[k] - mean[k]) / scale[k];
  return 1.0 / (1.0 + std::exp(-s));
}

std::vector<ScalarVector> load_summaries(const DatasetManifest& manifest) {
  std::vector<ScalarVector> out;
  std::map<std::string, MatchLog> logs;
  for (const ManifestEntry& e : manifest.entries) {
    auto it = logs.find(e.log_path);
    if (it == logs.end()) it = logs.emplace(e.log_path, read_log(e.log_path)).first;
    out.push_back(summarize_for_baseline(it->second, e.perspective));
  }
  return out;
}

CVResult run_baseline(const DatasetManifest& manifest, const std::vector<ScalarVector>& summaries,
                      const std::vector<double>& weights, const CVPlan& plan, const BaselineConfig& config) {
  if (summaries.size() != manifest.entries.size() || weights.size() != manifest.entries.size()) {
    throw Error("evaluation", "baseline inputs do not match the manifest");
  }
  const std::vector<int> folds = assign_folds(manifest, plan);
  CVResult result;
  result.model = "baseline";
  result.fold_hash = fold_hash(folds);
  for (int f = 0; f < plan.k; ++f) {
    std::vector<ScalarVector> x;
    std::vector<int> y;
    std::vector<double> w;
    std::vector<double> probs;
    std::vector<int> held_labels;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      if (folds[i] != f) {
        x.push_back(summaries[i]);
        y.push_back(manifest.entries[i].label);
        w.push_back(weights[i]);
      }
    }
    LogisticBaseline model;
    model.fit(x, y, w, config);
    for (std::size_t i = 0; i < folds.size(); ++i) {
      if (folds[i] == f) {
        probs.push_back(model.predict(summaries[i]));
        held_labels.push_back(manifest.entries[i].label);
      }
    }
    FoldResult r;
    r.fold = f;
    r.n_train = x.size();
    r.n_eval = probs.size();
    r.counts = confusion(probs, held_labels);
    r.metrics = metrics(r.counts);
    result.folds.push_back(r);
  }
  aggregate(result);
  return result;
}

namespace {

std::string metric_cells(const MetricsReport& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", m.macro_f1, m.f1_human, m.f1_bot, m.precision_human,
                m.recall_human, m.accuracy);
  return buf;
}

}  // namespace

std::string cv_csv(const std::vector<CVResult>& results) {
  std::string out =
      "model,fold,n_train,n_eval,tp,fp,fn,tn,macro_f1,f1_human,f1_bot,precision_human,recall_human,accuracy,"
      "macro_f1_std,precision_human_std,recall_human_std,fold_hash\n";
  for (const CVResult& r : results) {
    for (const FoldResult& f : r.folds) {
      out += r.model + "," + std::to_string(f.fold) + "," + std::to_string(f.n_train) + "," + std::to_string(f.n_eval) +
             "," + std::to_string(f.counts.tp) + "," + std::to_string(f.counts.fp) + "," + std::to_string(f.counts.fn) +
             "," + std::to_string(f.counts.tn) + "," + metric_cells(f.metrics) + ",,,," + r.fold_hash + "\n";
    }
    ConfusionCounts total;
    std::size_t n_eval = 0;
    for (const FoldResult& f : r.folds) {
      total += f.counts;
      n_eval += f.n_eval;
    }
    char sd[96];
    std::snprintf(sd, sizeof sd, "%.6f,%.6f,%.6f", r.stddev.macro_f1, r.stddev.precision_human, r.stddev.recall_human);
    out += r.model + ",aggregate,," + std::to_string(n_eval) + "," + std::to_string(total.tp) + "," +
           std::to_string(total.fp) + "," + std::to_string(total.fn) + "," + std::to_string(total.tn) + "," +
           metric_cells(r.mean) + "," + sd + "," + r.fold_hash + "\n";
  }
  return out;
}

std::string results_table(const std::vector<CVResult>& results) {
  char buf[200];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s | %-17s | %-17s | %s\n", "Model", "F1", "Precision(H)", "Recall(H)");
  out += buf;
  out += std::string(12, '-') + "-+-" + std::string(17, '-') + "-+-" + std::string(17, '-') + "-+-" +
         std::string(17, '-') + "\n";
  for (const CVResult& r : results) {
    std::snprintf(buf, sizeof buf, "%-12s | %.3f +/- %.3f   | %.3f +/- %.3f   | %.3f +/- %.3f\n", r.model.c_str(),
                  r.mean.macro_f1, r.stddev.macro_f1, r.mean.precision_human, r.stddev.precision_human,
                  r.mean.recall_human, r.stddev.recall_human);
    out += buf;
  }
  return out;
}

}  // namespace botsense
