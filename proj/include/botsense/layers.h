#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "botsense/rng.h"
#include "botsense/tensor.h"

namespace botsense {

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Param() = default;
  Param(std::string n, Tensor<T> v) : name(std::move(n)), value(std::move(v)), grad(value.shape) {}
};

// A differentiable block. forward caches what backward needs; backward
// returns the input gradient and ADDS parameter gradients into Param::grad.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual std::vector<Param<T>*> params() { return {}; }
  // Running statistics that are saved with a checkpoint but not trained.
  virtual std::vector<Param<T>*> buffers() { return {}; }
  // Restarts any internal randomness (dropout masks).
  virtual void reseed(std::uint64_t) {}

  void zero_grad() {
    for (Param<T>* p : params()) p->grad.fill(T(0));
  }
};

template <typename T>
using LayerPtr = std::unique_ptr<Layer<T>>;

enum class Activation : std::uint8_t { None, Relu, Sigmoid };

// NHWC cross-correlation, stride 1, "same" zero padding, odd square kernel
// [k,k,Cin,Cout].
template <typename T>
class Conv2D : public Layer<T> {
 public:
  Conv2D(std::string name, int in_channels, int out_channels, int kernel, Rng& rng, bool bias = true);
  std::string kind() const override { return "conv2d"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override;

  Param<T> kernel;
  Param<T> bias;
  bool has_bias;

 private:
  int cin_, cout_, k_;
  Tensor<T> input_;
};

template <typename T>
class ReLU : public Layer<T> {
 public:
  std::string kind() const override { return "relu"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;

 private:
  Tensor<T> input_;
};

// 2x2 windows, stride 2. Odd extents are padded on the right/bottom with
// -inf. Ties route the gradient to the first index in row-major order.
template <typename T>
class MaxPool2D : public Layer<T> {
 public:
  std::string kind() const override { return "maxpool2d"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;

 private:
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

// Per-channel normalization over every axis but the last.
template <typename T>
class BatchNorm : public Layer<T> {
 public:
  BatchNorm(std::string name, int channels, double momentum = 0.9, double eps = 1e-5);
  std::string kind() const override { return "batchnorm"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override { return {&gamma, &beta}; }
  std::vector<Param<T>*> buffers() override { return {&running_mean, &running_var}; }

  Param<T> gamma, beta, running_mean, running_var;
  double momentum, eps;

 private:
  int c_;
  bool last_train_ = false;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(std::string name, int in, int out, Activation act, Rng& rng);
  std::string kind() const override { return "dense"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override { return {&weight, &bias}; }

  Param<T> weight;  // [in, out]
  Param<T> bias;    // [out]
  Activation activation;

 private:
  int in_, out_;
  Tensor<T> input_, output_;
};

// Inverted dropout: train mode scales kept units by 1/(1-p).
template <typename T>
class Dropout : public Layer<T> {
 public:
  Dropout(double p, std::uint64_t seed);
  std::string kind() const override { return "dropout"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void reseed(std::uint64_t seed) override { rng_.seed(seed); }

  double p;

 private:
  Rng rng_;
  std::vector<T> mask_;
  bool masked_ = false;
};

// [N, ...] -> [N, prod(...)].
template <typename T>
class Flatten : public Layer<T> {
 public:
  std::string kind() const override { return "flatten"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;

 private:
  Shape in_shape_;
};

// [N,T,D] -> final hidden state [N,U]. Gates ordered (input, forget, cell,
// output) in the 4U columns of W [D,4U], Uh [U,4U] and b [4U].
template <typename T>
class LSTM : public Layer<T> {
 public:
  LSTM(std::string name, int input_size, int units, Rng& rng);
  std::string kind() const override { return "lstm"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override { return {&w, &u, &b}; }

  // Hidden states of the last forward pass, [N,T,U].
  const Tensor<T>& hidden_sequence() const { return hs_; }

  Param<T> w, u, b;

 private:
  int d_, units_;
  Tensor<T> x_;
  Tensor<T> gates_;  // post-activation [T,N,4U]
  Tensor<T> cs_;     // cell states [T,N,U]
  Tensor<T> hs_;     // [N,T,U]
};

// [N,T,F] -> [N,F], mean over time.
template <typename T>
class TemporalMean : public Layer<T> {
 public:
  std::string kind() const override { return "temporal_mean"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;

 private:
  Shape in_shape_;
};

template <typename T>
class Sequential : public Layer<T> {
 public:
  Sequential() = default;
  Sequential& add(LayerPtr<T> layer) {
    layers.push_back(std::move(layer));
    return *this;
  }
  std::string kind() const override { return "sequential"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override;
  std::vector<Param<T>*> buffers() override;
  void reseed(std::uint64_t seed) override;

  std::vector<LayerPtr<T>> layers;
};

// Applies `inner` to each time step of [N,T,...] with shared parameters by
// folding time into the batch axis.
template <typename T>
class TimeDistributed : public Layer<T> {
 public:
  explicit TimeDistributed(LayerPtr<T> inner) : inner(std::move(inner)) {}
  std::string kind() const override { return "time_distributed"; }
  Tensor<T> forward(const Tensor<T>& x, bool train) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override { return inner->params(); }
  std::vector<Param<T>*> buffers() override { return inner->buffers(); }
  void reseed(std::uint64_t seed) override { inner->reseed(seed); }

  LayerPtr<T> inner;

 private:
  int n_ = 0, t_ = 0;
};

}  // namespace botsense
