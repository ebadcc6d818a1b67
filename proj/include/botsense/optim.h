#pragma once

#include <cstdint>
#include <vector>

#include "botsense/layers.h"
#include "botsense/tensor.h"

namespace botsense {

constexpr double kBceClamp = 1e-7;

template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad;  // d loss / d predictions, same shape as predictions
};

// Weighted mean binary cross-entropy: sum_i w_i * l_i / N with predictions
// clamped to [1e-7, 1 - 1e-7]. Clamped entries get zero gradient.
template <typename T>
LossResult<T> bce_loss(const Tensor<T>& predictions, const std::vector<T>& labels, const std::vector<T>& weights);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, AdamConfig config = {});

  // One bias-corrected update from the gradients currently held in params.
  void step();
  std::int64_t steps() const { return t_; }

  AdamConfig config;

 private:
  std::vector<Param<T>*> params_;
  std::vector<Tensor<T>> m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace botsense
