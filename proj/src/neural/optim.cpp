#include "botsense/optim.h"

#include <algorithm>
#include <cmath>

namespace botsense {

template <typename T>
LossResult<T> bce_loss(const Tensor<T>& predictions, const std::vector<T>& labels, const std::vector<T>& weights) {
  const std::size_t n = predictions.size();
  if (labels.size() != n || weights.size() != n) {
    throw Error("shape", "bce_loss: " + std::to_string(n) + " predictions, " + std::to_string(labels.size()) +
                             " labels, " + std::to_string(weights.size()) + " weights");
  }
  if (n == 0) throw Error("shape", "bce_loss: empty batch");
  LossResult<T> r;
  r.grad = Tensor<T>(predictions.shape);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = predictions[i];
    const double p = std::clamp(raw, kBceClamp, 1.0 - kBceClamp);
    const double y = labels[i], w = weights[i];
    total += -w * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    if (raw > kBceClamp && raw < 1.0 - kBceClamp) {
      r.grad[i] = static_cast<T>(w * (p - y) / (p * (1.0 - p)) / static_cast<double>(n));
    }
  }
  r.loss = total / static_cast<double>(n);
  return r;
}

template <typename T>
Adam<T>::Adam(std::vector<Param<T>*> params, AdamConfig cfg) : config(cfg), params_(std::move(params)) {
  for (Param<T>* p : params_) {
    m_.emplace_back(p->value.shape);
    v_.emplace_back(p->value.shape);
  }
}

template <typename T>
void Adam<T>::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t_));
  const T b1 = static_cast<T>(config.beta1), b2 = static_cast<T>(config.beta2);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Param<T>& p = *params_[k];
    Tensor<T>& m = m_[k];
    Tensor<T>& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const T g = p.grad[i];
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p.value[i] -= static_cast<T>(config.lr * mhat / (std::sqrt(vhat) + config.eps));
    }
  }
}

template LossResult<float> bce_loss(const Tensor<float>&, const std::vector<float>&, const std::vector<float>&);
template LossResult<double> bce_loss(const Tensor<double>&, const std::vector<double>&, const std::vector<double>&);
template class Adam<float>;
template class Adam<double>;

}  // namespace botsense
