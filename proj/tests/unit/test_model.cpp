#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "botsense/agents.h"
#include "botsense/gradcheck.h"
#include "botsense/model.h"
#include "botsense/optim.h"

using namespace botsense;
namespace fs = std::filesystem;

namespace {

ModelConfig micro_config(Variant v = Variant::Full) {
  ModelConfig c;
  c.R = 8;
  c.T = 2;
  c.conv_filters = {3, 4};
  c.dense_width = 5;
  c.lstm_units = 4;
  c.head_widths = {4, 3};
  c.dropout = 0.25;
  c.batch_size = 3;
  c.epochs = 3;
  c.variant = v;
  return c;
}

FeatureSequence random_sequence(int T, int R, int label, Rng& rng) {
  FeatureSequence s;
  s.T = T;
  s.R = R;
  s.label = label;
  s.valid = T;
  s.spatial.resize(static_cast<std::size_t>(T) * R * R * kSpatialChannels);
  s.scalars.resize(static_cast<std::size_t>(T) * kScalarFeatures);
  for (float& v : s.spatial) v = bernoulli(rng, 0.2) ? static_cast<float>(uniform01(rng)) : 0.0f;
  for (float& v : s.scalars) v = static_cast<float>(uniform01(rng));
  return s;
}

// Label is carried by scalar slot 3 of the last step.
std::vector<FeatureSequence> toy_set(int n, int T, int R, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureSequence> out;
  for (int i = 0; i < n; ++i) {
    FeatureSequence s = random_sequence(T, R, i % 2, rng);
    s.scalars[static_cast<std::size_t>(T - 1) * kScalarFeatures + 3] = s.label ? 0.9f : 0.1f;
    s.group = i;
    out.push_back(std::move(s));
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("build: parameter count is a pure function of the config") {
  Model<float> a(micro_config());
  Model<float> b(micro_config());
  CHECK(a.parameter_count() == b.parameter_count());
  const int side = 2;  // 8 -> 4 -> 2
  const std::size_t expect = (9 * 6 * 3 + 3) + 2 * 3 + (9 * 3 * 4 + 4) + 2 * 4 + 2 * 20 + (side * side * 4 + 20) * 5 + 5 +
                             (5 * 16 + 4 * 16 + 16) + (4 * 4 + 4) + (4 * 3 + 3) + (3 + 1);
  CHECK(a.parameter_count() == expect);
  CHECK(a.state().size() == b.state().size());
}

TEST_CASE("build: rnn_only has no convolution parameters, cnn_only has no lstm") {
  Model<float> rnn(micro_config(Variant::RnnOnly));
  for (Param<float>* p : rnn.params()) {
    CHECK(p->name.find("conv") == std::string::npos);
    CHECK(p->name.find("bn1") == std::string::npos);
    CHECK(p->name.find("bn2") == std::string::npos);
  }
  CHECK(rnn.step_width() == kScalarFeatures);
  Model<float> cnn(micro_config(Variant::CnnOnly));
  bool has_conv = false;
  for (Param<float>* p : cnn.params()) {
    CHECK(p->name.find("lstm") == std::string::npos);
    has_conv |= p->name.find("conv") != std::string::npos;
  }
  CHECK(has_conv);

  // Scalars are batch-normalized wherever they enter the network.
  const auto has_scalar_bn = [](Model<float>& m) {
    for (Param<float>* p : m.params()) {
      if (p->name.rfind("scalar_bn", 0) == 0) return true;
    }
    return false;
  };
  Model<float> full(micro_config());
  CHECK(has_scalar_bn(full));
  CHECK(has_scalar_bn(rnn));
  CHECK_FALSE(has_scalar_bn(cnn));
}

TEST_CASE("build: outputs lie in (0,1) for every variant") {
  Rng rng(5);
  std::vector<FeatureSequence> seqs;
  for (int i = 0; i < 7; ++i) seqs.push_back(random_sequence(2, 8, i % 2, rng));
  for (Variant v : {Variant::Full, Variant::RnnOnly, Variant::CnnOnly}) {
    Model<float> m(micro_config(v));
    for (double p : m.predict(seqs)) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("build: invalid configs and mismatched sequences are rejected") {
  ModelConfig c = micro_config();
  c.kernel_size = 4;
  CHECK_THROWS_WITH_AS(Model<float>{c}, doctest::Contains("kernel_size"), Error);
  c = micro_config();
  c.dropout = 1.0;
  CHECK_THROWS_WITH_AS(Model<float>{c}, doctest::Contains("dropout"), Error);
  Model<float> m(micro_config());
  Rng rng(1);
  CHECK_THROWS_AS(m.predict(random_sequence(3, 8, 0, rng)), Error);
  CHECK_THROWS_AS(m.predict(random_sequence(2, 16, 0, rng)), Error);
}

TEST_CASE("config: JSON round trip and field diagnostics") {
  ModelConfig c = micro_config(Variant::CnnOnly);
  c.seed = 123456789012345ULL;
  c.lr = 3e-4;
  CHECK(model_config_from_json(to_json(c)) == c);
  CHECK(model_config_from_json(nlohmann::json::parse(to_json(c).dump())) == c);
  CHECK(model_config_from_json(nlohmann::json::object()) == ModelConfig{});
  CHECK_THROWS_WITH_AS(model_config_from_json({{"lstm_unit", 3}}), doctest::Contains("model.lstm_unit"), Error);
  CHECK_THROWS_WITH_AS(model_config_from_json({{"epochs", "many"}}), doctest::Contains("model.epochs"), Error);
  CHECK_THROWS_WITH_AS(model_config_from_json({{"variant", "both"}}), doctest::Contains("model.variant"), Error);
}

TEST_CASE("gradcheck: micro-scale full topology (R=8, T=2) over 5 seeds") {
  for (Variant v : {Variant::Full, Variant::RnnOnly, Variant::CnnOnly}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ModelConfig c = micro_config(v);
      c.seed = seed;
      Model<double> m(c);
      perturb_params(m.network(), 0.05, seed);
      Rng rng(seed + 40);
      std::vector<FeatureSequence> seqs;
      for (int i = 0; i < 2; ++i) seqs.push_back(random_sequence(2, 8, i, rng));
      std::vector<const FeatureSequence*> ptrs = {&seqs[0], &seqs[1]};
      const GradCheckReport r = grad_check(m.network(), m.pack(ptrs));
      INFO(variant_name(v), " seed ", seed, "\n", r.summary());
      CHECK(r.passed);
      CHECK(r.max_rel_err < 1e-4);
    }
  }
}

TEST_CASE("training step: every parameter tensor receives gradient") {
  Model<double> m(micro_config());
  Rng rng(3);
  std::vector<FeatureSequence> seqs;
  for (int i = 0; i < 4; ++i) seqs.push_back(random_sequence(2, 8, i % 2, rng));
  std::vector<const FeatureSequence*> ptrs;
  for (auto& s : seqs) ptrs.push_back(&s);
  m.network().zero_grad();
  const Tensor<double> y = m.forward(m.pack(ptrs), true);
  const LossResult<double> loss = bce_loss(y, {0, 1, 0, 1}, {1, 1, 1, 1});
  m.network().backward(loss.grad);
  for (Param<double>* p : m.params()) {
    bool nonzero = false;
    for (double g : p->grad.data) nonzero |= g != 0.0;
    INFO(p->name);
    CHECK(nonzero);
  }
}

TEST_CASE("batch symmetry: permuting a batch leaves the summed loss unchanged") {
  ModelConfig c = micro_config();
  c.dropout = 0.0;
  Model<double> m(c);
  Rng rng(8);
  std::vector<FeatureSequence> seqs;
  for (int i = 0; i < 5; ++i) seqs.push_back(random_sequence(2, 8, i % 2, rng));
  std::vector<const FeatureSequence*> fwd, rev;
  std::vector<double> yf, yr, w(5, 1.0);
  for (int i = 0; i < 5; ++i) {
    fwd.push_back(&seqs[i]);
    yf.push_back(seqs[i].label);
    rev.push_back(&seqs[4 - i]);
    yr.push_back(seqs[4 - i].label);
  }
  const double a = bce_loss(m.forward(m.pack(fwd), true), yf, w).loss;
  const double b = bce_loss(m.forward(m.pack(rev), true), yr, w).loss;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("train: one epoch on 8 sequences takes ceil(8 / batch) steps") {
  ModelConfig c = micro_config();
  c.epochs = 1;
  c.batch_size = 3;
  Model<float> m(c);
  const TrainReport r = train(m, toy_set(8, 2, 8, 1), {});
  REQUIRE(r.epochs.size() == 1);
  CHECK(r.epochs[0].steps == 3);
  CHECK(r.optimizer_steps == 3);
  CHECK_FALSE(r.has_validation);
}

TEST_CASE("train: a duplicated example with opposite labels keeps loss >= ln 2") {
  ModelConfig c = micro_config(Variant::RnnOnly);
  c.epochs = 30;
  c.dropout = 0.0;
  c.lr = 0.05;
  Model<float> m(c);
  Rng rng(2);
  FeatureSequence a = random_sequence(2, 8, 0, rng);
  FeatureSequence b = a;
  b.label = 1;
  train(m, {a, b}, {});
  const double p = m.predict(a);
  const double pair_loss = -(std::log(p) + std::log(1.0 - p)) / 2.0;
  CHECK(pair_loss >= std::log(2.0) - 1e-12);
  CHECK(p == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("train: rejects a one-class training set") {
  Model<float> m(micro_config());
  std::vector<FeatureSequence> set = toy_set(6, 2, 8, 1);
  for (auto& s : set) s.label = 0;
  CHECK_THROWS_AS(train(m, set, {}), Error);
}

TEST_CASE("train: identical seeds give identical checkpoints") {
  const fs::path dir = temp_dir("botsense_model_det");
  const std::vector<FeatureSequence> data = toy_set(12, 2, 8, 4);
  const std::vector<FeatureSequence> val = toy_set(6, 2, 8, 5);
  for (int run = 0; run < 2; ++run) {
    Model<float> m(micro_config());
    train(m, data, val, (dir / ("run" + std::to_string(run) + ".bsnn")).string());
  }
  CHECK(slurp(dir / "run0.bsnn") == slurp(dir / "run1.bsnn"));
  CHECK(slurp(dir / "run0.bsnn.json") == slurp(dir / "run1.bsnn.json"));
  fs::remove_all(dir);
}

TEST_CASE("train: early stopping restores the best epoch's weights") {
  // A validation pair with identical inputs and opposite labels keeps
  // macro-F1 at exactly 1/3 whatever the model predicts.
  Rng rng(6);
  FeatureSequence a = random_sequence(2, 8, 0, rng), b = a;
  b.label = 1;
  ModelConfig c = micro_config();
  c.epochs = 10;
  c.patience = 2;
  Model<float> m(c);
  const TrainReport r = train(m, toy_set(9, 2, 8, 7), {a, b});
  CHECK(r.early_stopped);
  CHECK(r.epochs.size() == 3);
  CHECK(r.best_epoch == 0);
  for (const EpochStats& e : r.epochs) CHECK(e.val_macro_f1 == doctest::Approx(1.0 / 3.0));

  c.epochs = 1;
  Model<float> once(c);
  train(once, toy_set(9, 2, 8, 7), {});
  CHECK(encode_checkpoint(m.state()) == encode_checkpoint(once.state()));
}

TEST_CASE("train: loss on a linearly separable 20-feature set decreases over 10 epochs") {
  ModelConfig c = micro_config(Variant::RnnOnly);
  c.T = 1;
  c.epochs = 10;
  c.dropout = 0.0;
  c.batch_size = 8;
  Model<float> m(c);
  Rng rng(11);
  std::vector<FeatureSequence> set;
  for (int i = 0; i < 200; ++i) {
    FeatureSequence s = random_sequence(1, 8, 0, rng);
    double score = 0.0;
    for (int k = 0; k < kScalarFeatures; ++k) score += (k % 2 ? 1.0 : -1.0) * (s.scalars[k] - 0.5);
    s.label = score > 0.0;
    set.push_back(std::move(s));
  }
  const TrainReport r = train(m, set, {});
  int non_monotone = 0;
  for (std::size_t e = 1; e < r.epochs.size(); ++e) non_monotone += r.epochs[e].train_loss >= r.epochs[e - 1].train_loss;
  CHECK(non_monotone <= 2);
  CHECK(r.epochs.back().train_loss < r.epochs.front().train_loss);
}

TEST_CASE("predict: deterministic, checkpoint round trip, pinned padding response") {
  const fs::path dir = temp_dir("botsense_model_predict");
  Model<float> m(micro_config());
  train(m, toy_set(9, 2, 8, 3), {});
  Rng rng(9);
  const FeatureSequence s = random_sequence(2, 8, 1, rng);
  const double p = m.predict(s);
  CHECK(m.predict(s) == p);

  const std::string path = (dir / "m.bsnn").string();
  save_model(m, path);
  Model<float> loaded = load_model(path);
  CHECK(loaded.config() == m.config());
  CHECK(loaded.predict(s) == p);
  save_model(loaded, (dir / "again.bsnn").string());
  CHECK(slurp(dir / "m.bsnn") == slurp(dir / "again.bsnn"));

  FeatureSequence zeros = s;
  std::fill(zeros.spatial.begin(), zeros.spatial.end(), 0.0f);
  std::fill(zeros.scalars.begin(), zeros.scalars.end(), 0.0f);
  const double p0 = m.predict(zeros);
  CHECK(m.predict(zeros) == p0);
  CHECK(p0 == doctest::Approx(0.505991).epsilon(1e-5));
  // Untrained, every stage maps zeros to zeros and the head gives exactly 0.5.
  Model<float> fresh(micro_config());
  CHECK(fresh.predict(zeros) == 0.5);
  fs::remove_all(dir);
}

TEST_CASE("load_model: missing sidecar and changed normalizers are rejected") {
  const fs::path dir = temp_dir("botsense_model_sidecar");
  Model<float> m(micro_config());
  const std::string path = (dir / "m.bsnn").string();
  save_model(m, path);
  std::string side = slurp(path + ".json");
  const auto at = side.find("\"count\": 20.0");
  REQUIRE(at != std::string::npos);
  side.replace(at, 13, "\"count\": 25.0");
  std::ofstream(path + ".json") << side;
  CHECK_THROWS_AS(load_model(path), Error);
  fs::remove(path + ".json");
  CHECK_THROWS_AS(load_model(path), Error);
  fs::remove_all(dir);
}

TEST_CASE("summarize_for_baseline: final-record scalars of a played match") {
  auto map = std::make_shared<const MapGeometry>(default_arena());
  Policy bot;
  bot.agent.search_budget = 40;
  Policy human = bot;
  human.persona = PersonaConfig::from_archetype(Archetype::Explorer);
  const MatchLog log = play_match(map, bot, human, 17);
  for (int p = 0; p < 2; ++p) {
    const ScalarVector v = summarize_for_baseline(log, p);
    CHECK(v == scalar_features(log, log.records.size() - 1, p));
  }
  MatchLog empty;
  CHECK_THROWS_AS(summarize_for_baseline(empty, 0), Error);
}
