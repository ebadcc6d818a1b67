#include "botsense/model.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "botsense/error.h"
#include "botsense/metrics.h"
#include "botsense/optim.h"

namespace botsense {

using Json = nlohmann::json;

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::RnnOnly: return "rnn_only";
    case Variant::CnnOnly: return "cnn_only";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::Full, Variant::RnnOnly, Variant::CnnOnly}) {
    if (name == variant_name(v)) return v;
  }
  throw Error("config", "model.variant: unknown variant '" + name + "' (expected full, rnn_only or cnn_only)");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) { throw Error("config", "model." + field + ": " + why); };
  if (R < 2) fail("R", "must be >= 2");
  if (T < 1) fail("T", "must be >= 1");
  for (int f : conv_filters) {
    if (f < 1) fail("conv_filters", "entries must be >= 1");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) fail("kernel_size", "must be odd and >= 1");
  if (dense_width < 1) fail("dense_width", "must be >= 1");
  if (lstm_units < 1) fail("lstm_units", "must be >= 1");
  for (int h : head_widths) {
    if (h < 1) fail("head_widths", "entries must be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must be in [0,1)");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail("lr", "must be positive");
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (epochs < 1) fail("epochs", "must be >= 1");
  if (patience < 1) fail("patience", "must be >= 1");
}

Json to_json(const ModelConfig& c) {
  return {{"R", c.R},
          {"T", c.T},
          {"conv_filters", c.conv_filters},
          {"kernel_size", c.kernel_size},
          {"dense_width", c.dense_width},
          {"lstm_units", c.lstm_units},
          {"head_widths", c.head_widths},
          {"dropout", c.dropout},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"variant", variant_name(c.variant)},
          {"deterministic", c.deterministic},
          {"patience", c.patience}};
}

ModelConfig model_config_from_json(const Json& j) {
  static const std::set<std::string> known = {"R",          "T",           "conv_filters", "kernel_size", "dense_width",
                                              "lstm_units", "head_widths", "dropout",      "lr",          "batch_size",
                                              "epochs",     "seed",        "variant",      "deterministic", "patience"};
  if (!j.is_object()) throw Error("config", "model: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw Error("config", "model." + it.key() + ": unknown field");
  }
  ModelConfig c;
  std::string field;
  try {
    auto get = [&](const char* key, auto& dst) {
      field = key;
      if (j.contains(key)) j.at(key).get_to(dst);
    };
    get("R", c.R);
    get("T", c.T);
    get("conv_filters", c.conv_filters);
    get("kernel_size", c.kernel_size);
    get("dense_width", c.dense_width);
    get("lstm_units", c.lstm_units);
    get("head_widths", c.head_widths);
    get("dropout", c.dropout);
    get("lr", c.lr);
    get("batch_size", c.batch_size);
    get("epochs", c.epochs);
    get("seed", c.seed);
    get("deterministic", c.deterministic);
    get("patience", c.patience);
    field = "variant";
    if (j.contains("variant")) c.variant = variant_from_name(j.at("variant").get<std::string>());
  } catch (const Json::exception& e) {
    throw Error("config", "model." + field + ": " + e.what());
  }
  c.validate();
  return c;
}

namespace {

int pooled(int r) { return (r + 1) / 2; }

// Splits a packed step row into its [R,R,C] frame and scalar tail, runs
// the spatial stack on the frame and optionally re-appends the scalars
// after batch normalization.
template <typename T>
class SpatialScalarBlock : public Layer<T> {
 public:
  SpatialScalarBlock(int R, int S, bool keep_scalars, LayerPtr<T> spatial)
      : r_(R), s_(S), keep_(keep_scalars), spatial_(std::move(spatial)) {}
  std::string kind() const override { return "spatial_scalar"; }

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    const int M = x.dim(0), P = r_ * r_ * kSpatialChannels, D = P + s_;
    if (x.rank() != 2 || x.dim(1) != D) throw Error("shape", "spatial block expects [M," + std::to_string(D) + "], got " + shape_str(x.shape));
    Tensor<T> frames({M, r_, r_, kSpatialChannels});
    for (int m = 0; m < M; ++m) {
      std::copy_n(x.ptr() + static_cast<std::size_t>(m) * D, P, frames.ptr() + static_cast<std::size_t>(m) * P);
    }
    const Tensor<T> f = spatial_->forward(frames, train);
    f_ = f.dim(1);
    const int W = f_ + (keep_ ? s_ : 0);
    Tensor<T> out({M, W});
    for (int m = 0; m < M; ++m) {
      T* o = out.ptr() + static_cast<std::size_t>(m) * W;
      std::copy_n(f.ptr() + static_cast<std::size_t>(m) * f_, f_, o);
    }
    if (keep_) {
      Tensor<T> scalars({M, s_});
      for (int m = 0; m < M; ++m) {
        std::copy_n(x.ptr() + static_cast<std::size_t>(m) * D + P, s_, scalars.ptr() + static_cast<std::size_t>(m) * s_);
      }
      const Tensor<T> z = scalar_norm_->forward(scalars, train);
      for (int m = 0; m < M; ++m) {
        std::copy_n(z.ptr() + static_cast<std::size_t>(m) * s_, s_, out.ptr() + static_cast<std::size_t>(m) * W + f_);
      }
    }
    m_ = M;
    return out;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const int P = r_ * r_ * kSpatialChannels, D = P + s_, W = f_ + (keep_ ? s_ : 0);
    Tensor<T> gf({m_, f_});
    for (int m = 0; m < m_; ++m) std::copy_n(g.ptr() + static_cast<std::size_t>(m) * W, f_, gf.ptr() + static_cast<std::size_t>(m) * f_);
    const Tensor<T> dframes = spatial_->backward(gf);
    Tensor<T> dx({m_, D});
    for (int m = 0; m < m_; ++m) {
      std::copy_n(dframes.ptr() + static_cast<std::size_t>(m) * P, P, dx.ptr() + static_cast<std::size_t>(m) * D);
    }
    if (keep_) {
      Tensor<T> gs({m_, s_});
      for (int m = 0; m < m_; ++m) {
        std::copy_n(g.ptr() + static_cast<std::size_t>(m) * W + f_, s_, gs.ptr() + static_cast<std::size_t>(m) * s_);
      }
      const Tensor<T> ds = scalar_norm_->backward(gs);
      for (int m = 0; m < m_; ++m) {
        std::copy_n(ds.ptr() + static_cast<std::size_t>(m) * s_, s_, dx.ptr() + static_cast<std::size_t>(m) * D + P);
      }
    }
    return dx;
  }

  std::vector<Param<T>*> params() override { return joined(spatial_->params(), scalar_norm_->params()); }
  std::vector<Param<T>*> buffers() override { return joined(spatial_->buffers(), scalar_norm_->buffers()); }
  void reseed(std::uint64_t seed) override { spatial_->reseed(seed); }

 private:
  std::vector<Param<T>*> joined(std::vector<Param<T>*> a, const std::vector<Param<T>*>& b) const {
    if (keep_) a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  int r_, s_;
  bool keep_;
  LayerPtr<T> spatial_;
  LayerPtr<T> scalar_norm_ = std::make_unique<BatchNorm<T>>("scalar_bn", kScalarFeatures);
  int f_ = 0, m_ = 0;
};

template <typename T, typename L, typename... Args>
LayerPtr<T> make(Args&&... args) {
  return std::make_unique<L>(std::forward<Args>(args)...);
}

template <typename T>
LayerPtr<T> spatial_step(const ModelConfig& c, bool keep_scalars, Rng& rng) {
  auto conv = std::make_unique<Sequential<T>>();
  conv->add(make<T, Conv2D<T>>("conv1", kSpatialChannels, c.conv_filters[0], c.kernel_size, rng));
  conv->add(make<T, ReLU<T>>());
  conv->add(make<T, MaxPool2D<T>>());
  conv->add(make<T, BatchNorm<T>>("bn1", c.conv_filters[0]));
  conv->add(make<T, Conv2D<T>>("conv2", c.conv_filters[0], c.conv_filters[1], c.kernel_size, rng));
  conv->add(make<T, ReLU<T>>());
  conv->add(make<T, MaxPool2D<T>>());
  conv->add(make<T, BatchNorm<T>>("bn2", c.conv_filters[1]));
  conv->add(make<T, Flatten<T>>());
  const int side = pooled(pooled(c.R));
  const int features = side * side * c.conv_filters[1] + (keep_scalars ? kScalarFeatures : 0);

  auto step = std::make_unique<Sequential<T>>();
  step->add(std::make_unique<SpatialScalarBlock<T>>(c.R, kScalarFeatures, keep_scalars, std::move(conv)));
  step->add(make<T, Dense<T>>("step_dense", features, c.dense_width, Activation::Relu, rng));
  step->add(make<T, Dropout<T>>(c.dropout, 0));
  return std::make_unique<TimeDistributed<T>>(std::move(step));
}

}  // namespace

template <typename T>
Model<T>::Model(const ModelConfig& config) : config_(config) {
  config_.validate();
  Rng rng(mix_seed(config_.seed, 0x1417));
  int temporal_width = 0;
  switch (config_.variant) {
    case Variant::Full:
      net_.add(spatial_step<T>(config_, true, rng));
      net_.add(make<T, LSTM<T>>("lstm", config_.dense_width, config_.lstm_units, rng));
      temporal_width = config_.lstm_units;
      break;
    case Variant::RnnOnly:
      net_.add(make<T, BatchNorm<T>>("scalar_bn", kScalarFeatures));
      net_.add(make<T, LSTM<T>>("lstm", kScalarFeatures, config_.lstm_units, rng));
      temporal_width = config_.lstm_units;
      break;
    case Variant::CnnOnly:
      net_.add(spatial_step<T>(config_, false, rng));
      net_.add(make<T, TemporalMean<T>>());
      temporal_width = config_.dense_width;
      break;
  }
  net_.add(make<T, Dense<T>>("head1", temporal_width, config_.head_widths[0], Activation::Relu, rng));
  net_.add(make<T, Dense<T>>("head2", config_.head_widths[0], config_.head_widths[1], Activation::Relu, rng));
  net_.add(make<T, Dense<T>>("output", config_.head_widths[1], 1, Activation::Sigmoid, rng));
  net_.reseed(mix_seed(config_.seed, 0xd0));
}

template <typename T>
int Model<T>::step_width() const {
  if (config_.variant == Variant::RnnOnly) return kScalarFeatures;
  return config_.R * config_.R * kSpatialChannels + kScalarFeatures;
}

template <typename T>
std::size_t Model<T>::parameter_count() {
  std::size_t n = 0;
  for (Param<T>* p : net_.params()) n += p->value.size();
  return n;
}

template <typename T>
Tensor<T> Model<T>::pack(const std::vector<const FeatureSequence*>& batch) const {
  if (batch.empty()) throw Error("shape", "cannot pack an empty batch");
  const int Tn = config_.T, R = config_.R, D = step_width();
  const bool spatial = config_.variant != Variant::RnnOnly;
  const std::size_t P = static_cast<std::size_t>(R) * R * kSpatialChannels;
  Tensor<T> x({static_cast<int>(batch.size()), Tn, D});
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const FeatureSequence& s = *batch[n];
    if (s.T != Tn || s.R != R || s.scalars.size() != static_cast<std::size_t>(Tn) * kScalarFeatures ||
        s.spatial.size() != Tn * P) {
      throw Error("shape", "sequence has T=" + std::to_string(s.T) + " R=" + std::to_string(s.R) +
                               ", model expects T=" + std::to_string(Tn) + " R=" + std::to_string(R));
    }
    for (int t = 0; t < Tn; ++t) {
      T* row = x.ptr() + (n * Tn + t) * static_cast<std::size_t>(D);
      if (spatial) {
        std::copy_n(s.frame(t), P, row);
        row += P;
      }
      std::copy_n(s.scalars.data() + static_cast<std::size_t>(t) * kScalarFeatures, kScalarFeatures, row);
    }
  }
  return x;
}

template <typename T>
std::vector<double> Model<T>::predict(const std::vector<FeatureSequence>& sequences) {
  std::vector<double> out;
  out.reserve(sequences.size());
  const std::size_t bs = config_.batch_size;
  for (std::size_t start = 0; start < sequences.size(); start += bs) {
    std::vector<const FeatureSequence*> batch;
    for (std::size_t i = start; i < std::min(sequences.size(), start + bs); ++i) batch.push_back(&sequences[i]);
    const Tensor<T> y = net_.forward(pack(batch), false);
    for (std::size_t i = 0; i < y.size(); ++i) out.push_back(static_cast<double>(y[i]));
  }
  return out;
}

template <typename T>
double Model<T>::predict(const FeatureSequence& sequence) {
  return net_.forward(pack({&sequence}), false)[0];
}

template <typename T>
std::vector<CheckpointTensor> Model<T>::state() {
  std::vector<CheckpointTensor> out;
  for (Param<T>* p : net_.params()) out.push_back(to_checkpoint(*p));
  for (Param<T>* p : net_.buffers()) out.push_back(to_checkpoint(*p));
  return out;
}

template <typename T>
void Model<T>::load_state(const std::vector<CheckpointTensor>& tensors) {
  std::vector<Param<T>*> all = net_.params();
  for (Param<T>* p : net_.buffers()) all.push_back(p);
  load_params(tensors, all);
}

template class Model<float>;
template class Model<double>;

namespace {

struct EvalResult {
  double loss = 0.0;
  double macro_f1 = 0.0;
};

EvalResult evaluate(Model<float>& model, const std::vector<FeatureSequence>& set) {
  const std::vector<double> probs = model.predict(set);
  Tensor<double> p({static_cast<int>(set.size())}, probs);
  std::vector<double> y, w;
  std::vector<int> labels;
  for (const FeatureSequence& s : set) {
    y.push_back(s.label);
    w.push_back(s.weight);
    labels.push_back(s.label);
  }
  EvalResult r;
  r.loss = bce_loss(p, y, w).loss;
  r.macro_f1 = metrics(confusion(probs, labels)).macro_f1;
  return r;
}

}  // namespace

TrainReport train(Model<float>& model, const std::vector<FeatureSequence>& train_set,
                  const std::vector<FeatureSequence>& val_set, const std::string& checkpoint_path) {
  const auto started = std::chrono::steady_clock::now();
  const ModelConfig& c = model.config();
  if (train_set.empty()) throw Error("dataset", "training set is empty");
  std::array<int, 2> counts{};
  for (const FeatureSequence& s : train_set) ++counts[s.label == 1];
  if (counts[0] == 0 || counts[1] == 0) {
    throw Error("dataset", "training set needs both classes (bot=" + std::to_string(counts[0]) +
                               ", human=" + std::to_string(counts[1]) + ")");
  }

  AdamConfig acfg;
  acfg.lr = c.lr;
  Adam<float> adam(model.params(), acfg);
  Sequential<float>& net = model.network();

  TrainReport report;
  report.has_validation = !val_set.empty();
  double best_f1 = -1.0;
  int since_best = 0;
  std::vector<CheckpointTensor> best_state;

  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle(mix_seed(c.seed, 0xe0000 + epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle, i)]);

    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += c.batch_size) {
      std::vector<const FeatureSequence*> batch;
      std::vector<float> y, w;
      for (std::size_t i = start; i < std::min(order.size(), start + c.batch_size); ++i) {
        const FeatureSequence& s = train_set[order[i]];
        batch.push_back(&s);
        y.push_back(static_cast<float>(s.label));
        w.push_back(s.weight);
      }
      net.zero_grad();
      const Tensor<float> out = net.forward(model.pack(batch), true);
      const LossResult<float> loss = bce_loss(out, y, w);
      if (!std::isfinite(loss.loss)) {
        throw Error("numeric", "training diverged: loss is " + std::to_string(loss.loss) + " at epoch " +
                                   std::to_string(epoch) + " step " + std::to_string(stats.steps));
      }
      net.backward(loss.grad);
      adam.step();
      ++stats.steps;
      loss_sum += loss.loss * static_cast<double>(batch.size());
    }
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    report.optimizer_steps += stats.steps;

    if (report.has_validation) {
      const EvalResult v = evaluate(model, val_set);
      stats.val_loss = v.loss;
      stats.val_macro_f1 = v.macro_f1;
      report.epochs.push_back(stats);
      if (v.macro_f1 > best_f1) {
        best_f1 = v.macro_f1;
        best_state = model.state();
        report.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= c.patience) {
        report.early_stopped = true;
        break;
      }
    } else {
      report.epochs.push_back(stats);
      report.best_epoch = epoch;
    }
  }
  if (!best_state.empty()) model.load_state(best_state);
  if (!checkpoint_path.empty()) {
    save_model(model, checkpoint_path);
    report.checkpoint_path = checkpoint_path;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void save_model(Model<float>& model, const std::string& path) {
  write_checkpoint_file(path, model.state());
  const Json sidecar = {{"format", "BSNN1"},
                        {"config", to_json(model.config())},
                        {"normalizers",
                         {{"turn", "max_turns"},
                          {"damage", kNormalizers.damage},
                          {"count", kNormalizers.count},
                          {"unit_raster_fraction", kUnitRasterFraction}}}};
  std::ofstream out(path + ".json", std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path + ".json");
  out << sidecar.dump(2) << "\n";
}

Model<float> load_model(const std::string& path) {
  std::ifstream in(path + ".json", std::ios::binary);
  if (!in) throw Error("io", "cannot open checkpoint sidecar " + path + ".json");
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw Error("schema", "malformed checkpoint sidecar: " + std::string(e.what()));
  }
  if (!j.contains("config")) throw Error("schema", "checkpoint sidecar lacks a config");
  const Json& n = j.value("normalizers", Json::object());
  if (n.value("damage", kNormalizers.damage) != kNormalizers.damage ||
      n.value("count", kNormalizers.count) != kNormalizers.count) {
    throw Error("schema", "checkpoint was trained with different feature normalizers");
  }
  Model<float> model(model_config_from_json(j.at("config")));
  model.load_state(read_checkpoint_file(path));
  return model;
}

ScalarVector summarize_for_baseline(const MatchLog& log, int perspective) {
  if (log.records.empty()) throw Error("feature", "cannot summarize an empty log");
  return scalar_features(log, log.records.size() - 1, perspective);
}

}  // namespace botsense
