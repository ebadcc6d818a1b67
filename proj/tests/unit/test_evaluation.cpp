#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "botsense/evaluation.h"
#include "botsense/metrics.h"

using namespace botsense;

namespace {

// Brute-force recomputation straight from (prediction, label) pairs.
MetricsReport brute_force(const std::vector<double>& probs, const std::vector<int>& labels) {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int pred = probs[i] >= 0.5 ? 1 : 0;
    tp += pred == 1 && labels[i] == 1;
    fp += pred == 1 && labels[i] == 0;
    fn += pred == 0 && labels[i] == 1;
    tn += pred == 0 && labels[i] == 0;
  }
  auto f1 = [](std::int64_t a, std::int64_t b, std::int64_t c) {
    return 2 * a + b + c == 0 ? 0.0 : static_cast<double>(2 * a) / static_cast<double>(2 * a + b + c);
  };
  MetricsReport r;
  r.f1_human = f1(tp, fp, fn);
  r.f1_bot = f1(tn, fn, fp);
  r.macro_f1 = (r.f1_human + r.f1_bot) / 2.0;
  r.precision_human = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall_human = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(probs.size());
  return r;
}

// n matches, two perspectives each; composition cycles BB, BH, HH.
DatasetManifest synthetic_manifest(int matches) {
  DatasetManifest m;
  m.T = 2;
  m.R = 8;
  for (int g = 0; g < matches; ++g) {
    const int comp = g % 3;
    m.entries.push_back({"m" + std::to_string(g), 0, comp == 2 ? 1 : 0, g});
    m.entries.push_back({"m" + std::to_string(g), 1, comp >= 1 ? 1 : 0, g});
  }
  return m;
}

FeatureSequence toy_sequence(int label, Rng& rng) {
  FeatureSequence s;
  s.T = 2;
  s.R = 8;
  s.label = label;
  s.valid = 2;
  s.spatial.assign(2 * 8 * 8 * kSpatialChannels, 0.0f);
  s.scalars.resize(2 * kScalarFeatures);
  for (float& v : s.scalars) v = static_cast<float>(uniform01(rng));
  s.scalars[kScalarFeatures + 4] = label ? 0.8f : 0.2f;
  return s;
}

std::vector<FeatureSequence> sequences_for(const DatasetManifest& m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureSequence> out;
  for (const ManifestEntry& e : m.entries) {
    out.push_back(toy_sequence(e.label, rng));
    out.back().group = e.group;
  }
  return out;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.R = 8;
  c.T = 2;
  c.conv_filters = {2, 2};
  c.dense_width = 4;
  c.lstm_units = 4;
  c.head_widths = {4, 4};
  c.epochs = 4;
  c.batch_size = 4;
  c.lr = 0.01;
  return c;
}

}  // namespace

TEST_CASE("confusion: perfect, all-human and tie cases") {
  const ConfusionCounts perfect = confusion({0.9, 0.1, 0.7, 0.2}, {1, 0, 1, 0});
  CHECK(perfect == ConfusionCounts{2, 0, 0, 2});
  const ConfusionCounts all_human = confusion({0.9, 0.8, 0.6}, {0, 0, 0});
  CHECK(all_human.tp == 0);
  CHECK(all_human.fp == 3);
  CHECK(confusion({0.5}, {1}).tp == 1);
  CHECK(confusion({0.5}, {0}).fp == 1);
  CHECK(confusion({std::nextafter(0.5, 0.0)}, {1}).fn == 1);
  CHECK_THROWS_AS(confusion({}, {}), Error);
  CHECK_THROWS_AS(confusion({0.1}, {0, 1}), Error);
}

TEST_CASE("metrics: worked examples") {
  const MetricsReport perfect = metrics(ConfusionCounts{5, 0, 0, 5});
  CHECK(perfect.macro_f1 == 1.0);
  CHECK(perfect.f1_human == 1.0);
  CHECK(perfect.f1_bot == 1.0);
  CHECK(perfect.precision_human == 1.0);
  CHECK(perfect.recall_human == 1.0);
  CHECK(perfect.accuracy == 1.0);

  const MetricsReport hand = metrics(ConfusionCounts{2, 1, 1, 0});
  CHECK(hand.f1_human == 4.0 / 6.0);
  const MetricsReport none = metrics(ConfusionCounts{0, 0, 3, 1});
  CHECK(none.f1_human == 0.0);
  CHECK(none.precision_human == 0.0);
  CHECK(none.recall_human == 0.0);
  CHECK(none.f1_bot == 2.0 / 5.0);
  CHECK_THROWS_AS(metrics(ConfusionCounts{}), Error);
}

TEST_CASE("metrics: 1000 random sets match a brute-force recomputation exactly") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 60));
    std::vector<double> probs(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      probs[i] = bernoulli(rng, 0.1) ? 0.5 : uniform01(rng);
      labels[i] = bernoulli(rng, uniform01(rng));
    }
    const MetricsReport got = metrics(confusion(probs, labels));
    const MetricsReport want = brute_force(probs, labels);
    REQUIRE(got == want);

    // Human and bot swap roles under a simultaneous label and prediction flip.
    std::vector<double> flipped_probs(n);
    std::vector<int> flipped_labels(n);
    bool has_tie = false;
    for (int i = 0; i < n; ++i) {
      has_tie |= probs[i] == 0.5;
      flipped_probs[i] = 1.0 - probs[i];
      flipped_labels[i] = 1 - labels[i];
    }
    if (!has_tie) {
      const MetricsReport swapped = metrics(confusion(flipped_probs, flipped_labels));
      CHECK(swapped.macro_f1 == got.macro_f1);
      CHECK(swapped.f1_human == got.f1_bot);
    }
    for (double v : {got.f1_human, got.f1_bot, got.macro_f1, got.precision_human, got.recall_human, got.accuracy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("assign_folds: match-atomic stratified partition") {
  const DatasetManifest m = synthetic_manifest(30);
  const CVPlan plan{5, 9, 0.2};
  const std::vector<int> folds = assign_folds(m, plan);
  REQUIRE(folds.size() == m.entries.size());
  std::map<int, std::set<int>> fold_of_group;
  std::array<std::array<int, 3>, 5> comp_per_fold{};
  for (std::size_t i = 0; i < folds.size(); ++i) {
    CHECK(folds[i] >= 0);
    CHECK(folds[i] < 5);
    fold_of_group[m.entries[i].group].insert(folds[i]);
    if (m.entries[i].perspective == 0) ++comp_per_fold[folds[i]][m.entries[i].group % 3];
  }
  for (const auto& [g, fs] : fold_of_group) CHECK(fs.size() == 1);
  for (const auto& f : comp_per_fold) {
    for (int c : f) CHECK(c == 2);  // 10 matches per composition over 5 folds
  }
  CHECK(assign_folds(m, plan) == folds);
  CHECK(fold_hash(assign_folds(m, plan)) == fold_hash(folds));
  CHECK(assign_folds(m, CVPlan{5, 10, 0.2}) != folds);
}

TEST_CASE("assign_folds: too few matches per class is rejected with a diagnostic") {
  const DatasetManifest m = synthetic_manifest(4);  // humans appear in 2 matches, bots in 3
  CHECK_THROWS_WITH_AS(assign_folds(m, CVPlan{5, 0, 0.0}), doctest::Contains("need at least 5 matches"), Error);
  CHECK_THROWS_AS(assign_folds(m, CVPlan{1, 0, 0.0}), Error);
}

TEST_CASE("cross_validate: k=2 on 4 matches gives two disjoint evaluation sets") {
  DatasetManifest m;
  for (int g = 0; g < 4; ++g) {
    m.entries.push_back({"m", 0, 0, g});
    m.entries.push_back({"m", 1, 1, g});
  }
  const std::vector<FeatureSequence> seqs = sequences_for(m, 1);
  const CVPlan plan{2, 3, 0.0};
  const CVResult r = cross_validate(m, seqs, tiny_config(), plan);
  REQUIRE(r.folds.size() == 2);
  CHECK(r.folds[0].n_eval + r.folds[1].n_eval == 8);
  CHECK(r.folds[0].n_train == r.folds[1].n_eval);
  CHECK(r.folds[0].train.epochs.size() == 4);
  const std::vector<int> folds = assign_folds(m, plan);
  for (int f = 0; f < 2; ++f) CHECK(std::count(folds.begin(), folds.end(), f) == 4);
  CHECK(r.mean.macro_f1 == (r.folds[0].metrics.macro_f1 + r.folds[1].metrics.macro_f1) / 2.0);
  const double d = r.folds[0].metrics.macro_f1 - r.mean.macro_f1;
  CHECK(r.stddev.macro_f1 == doctest::Approx(std::sqrt(2 * d * d)));
}

TEST_CASE("cross_validate: deterministic, job-count independent, learns an easy signal") {
  const DatasetManifest m = synthetic_manifest(24);
  const std::vector<FeatureSequence> seqs = sequences_for(m, 2);
  ModelConfig c = tiny_config();
  c.variant = Variant::RnnOnly;
  c.epochs = 100;
  c.patience = 100;
  const CVPlan plan{3, 4, 0.2};
  EvalOptions serial;
  EvalOptions parallel;
  parallel.jobs = 3;
  std::vector<std::string> lines;
  parallel.log = [&](const std::string& s) { lines.push_back(s); };
  const CVResult a = cross_validate(m, seqs, c, plan, serial);
  const CVResult b = cross_validate(m, seqs, c, plan, parallel);
  CHECK(a.mean == b.mean);
  for (int f = 0; f < 3; ++f) CHECK(a.folds[f].counts == b.folds[f].counts);
  CHECK(lines.size() == 3);
  CHECK(a.folds[0].train.has_validation);

  const CVResult full_epochs = cross_validate(m, seqs, c, CVPlan{3, 4, 0.0});
  CHECK_FALSE(full_epochs.folds[0].train.has_validation);
  CHECK(full_epochs.mean.macro_f1 > 0.9);
}

TEST_CASE("cross_validate: rejects misaligned sequences") {
  const DatasetManifest m = synthetic_manifest(12);
  std::vector<FeatureSequence> seqs = sequences_for(m, 2);
  seqs.pop_back();
  CHECK_THROWS_AS(cross_validate(m, seqs, tiny_config(), CVPlan{2, 0, 0.0}), Error);
}

TEST_CASE("run_ablation: three rows sharing folds, results table layout") {
  const DatasetManifest m = synthetic_manifest(12);
  const std::vector<FeatureSequence> seqs = sequences_for(m, 3);
  ModelConfig c = tiny_config();
  c.epochs = 2;
  const AblationResult r = run_ablation(m, seqs, c, CVPlan{2, 5, 0.0});
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].model == "full");
  CHECK(r.rows[1].model == "rnn_only");
  CHECK(r.rows[2].model == "cnn_only");
  CHECK(r.rows[0].fold_hash == r.rows[1].fold_hash);
  CHECK(r.rows[1].fold_hash == r.rows[2].fold_hash);
  REQUIRE(r.log.size() == 3);
  CHECK(r.log[0] == "fold-hash full " + r.rows[0].fold_hash);

  const std::string table = results_table(r.rows);
  std::istringstream in(table);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0].find("F1") != std::string::npos);
  CHECK(lines[0].find("Precision(H)") != std::string::npos);
  CHECK(lines[0].find("Recall(H)") != std::string::npos);
  CHECK(lines[2].rfind("full", 0) == 0);

  const std::string csv = cv_csv(r.rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * (2 + 1));
  CHECK(csv.find("cnn_only,aggregate") != std::string::npos);
}

TEST_CASE("baseline: zero init predicts 0.5 and a friendly-fire threshold is learned") {
  LogisticBaseline untrained;
  ScalarVector any{};
  any[3] = 0.7f;
  CHECK(untrained.predict(any) == 0.5);

  LogisticBaseline zero_steps;
  zero_steps.fit({any, ScalarVector{}}, {1, 0}, {1, 1}, BaselineConfig{0, 0.5});
  CHECK(zero_steps.predict(any) == 0.5);

  const DatasetManifest m = synthetic_manifest(60);
  Rng rng(5);
  std::vector<ScalarVector> x;
  for (const ManifestEntry& e : m.entries) {
    ScalarVector v{};
    for (float& f : v) f = static_cast<float>(uniform01(rng));
    v[kScalarFriendlyFireRatio] = static_cast<float>(e.label ? uniform(rng, 0.0, 0.09) : uniform(rng, 0.11, 0.4));
    x.push_back(v);
  }
  const CVResult r = run_baseline(m, x, std::vector<double>(x.size(), 1.0), CVPlan{5, 1, 0.0});
  CHECK(r.model == "baseline");
  CHECK(r.folds.size() == 5);
  CHECK(r.mean.macro_f1 >= 0.95);
}

TEST_CASE("baseline: identical summaries across classes stay near chance") {
  const DatasetManifest m = synthetic_manifest(60);
  Rng rng(6);
  std::vector<ScalarVector> x;
  ScalarVector shared{};
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    if (i % 2 == 0) {
      for (float& f : shared) f = static_cast<float>(uniform01(rng));
    }
    x.push_back(shared);
  }
  // Within each match both perspectives carry the same summary; labels
  // differ in the BH matches, so no summary function separates them.
  const CVResult r = run_baseline(m, x, std::vector<double>(x.size(), 1.0), CVPlan{5, 1, 0.0});
  CHECK(r.mean.macro_f1 <= 0.75);
}

TEST_CASE("plan JSON round trip and diagnostics") {
  const CVPlan p{4, 77, 0.1};
  CHECK(cv_plan_from_json(to_json(p)) == p);
  CHECK_THROWS_WITH_AS(cv_plan_from_json({{"fold", 3}}), doctest::Contains("evaluate.plan.fold"), Error);
  CHECK_THROWS_AS(cv_plan_from_json({{"folds", 1}}), Error);
}
