#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "botsense/checkpoint.h"
#include "botsense/features.h"
#include "botsense/layers.h"
#include "botsense/match_log.h"

namespace botsense {

enum class Variant : std::uint8_t { Full, RnnOnly, CnnOnly };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);  // throws Error("config")

struct ModelConfig {
  int R = 64;
  int T = 32;
  std::array<int, 2> conv_filters{8, 16};
  int kernel_size = 3;
  int dense_width = 32;
  int lstm_units = 32;
  std::array<int, 2> head_widths{16, 8};
  double dropout = 0.2;
  double lr = 1e-3;
  int batch_size = 16;
  int epochs = 20;
  std::uint64_t seed = 1;
  Variant variant = Variant::Full;
  // Training is always single-threaded and reproducible; the flag is kept for
  // config compatibility.
  bool deterministic = true;
  int patience = 5;

  // Throws Error("config") naming the offending field.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

nlohmann::json to_json(const ModelConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig model_config_from_json(const nlohmann::json& j);

// Packs frames (full, cnn_only) and scalars into one time-major input row
// per step: [R*R*6 spatial | 20 scalars] or [20 scalars] for rnn_only.
template <typename T>
class Model {
 public:
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  Sequential<T>& network() { return net_; }

  int step_width() const;
  std::size_t parameter_count();

  // Throws Error("shape") when a sequence's T or R differs from the config.
  Tensor<T> pack(const std::vector<const FeatureSequence*>& batch) const;
  Tensor<T> forward(const Tensor<T>& input, bool train) { return net_.forward(input, train); }

  // Infer-mode probabilities that the perspective player is human.
  std::vector<double> predict(const std::vector<FeatureSequence>& sequences);
  double predict(const FeatureSequence& sequence);

  // Parameters followed by running statistics, in network order.
  std::vector<CheckpointTensor> state();
  void load_state(const std::vector<CheckpointTensor>& tensors);
  std::vector<Param<T>*> params() { return net_.params(); }

 private:
  ModelConfig config_;
  Sequential<T> net_;
};

struct EpochStats {
  int epoch = 0;
  int steps = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_macro_f1 = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int optimizer_steps = 0;
  int best_epoch = -1;
  bool early_stopped = false;
  bool has_validation = false;
  double wall_seconds = 0.0;
  std::string checkpoint_path;
};

// Mini-batch Adam on weighted BCE. With a validation set, early-stops on
// validation macro-F1 after `patience` epochs without improvement and
// restores the best weights. Throws Error("numeric") if the loss diverges
// and Error("dataset") if the training set lacks a class.
TrainReport train(Model<float>& model, const std::vector<FeatureSequence>& train_set,
                  const std::vector<FeatureSequence>& val_set, const std::string& checkpoint_path = "");

// Writes `path` (BSNN1) and `path + ".json"` (config and normalizers).
void save_model(Model<float>& model, const std::string& path);
Model<float> load_model(const std::string& path);

// Scalar features at the final record of a completed log.
ScalarVector summarize_for_baseline(const MatchLog& log, int perspective);

}  // namespace botsense
