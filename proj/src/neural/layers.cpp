#include "botsense/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace botsense {

namespace {

template <typename T>
void he_normal(Tensor<T>& t, int fan_in, Rng& rng, double gain = 2.0) {
  const double sd = std::sqrt(gain / fan_in);
  for (T& v : t.data) v = static_cast<T>(sd * standard_normal(rng));
}

template <typename T>
T sigmoid(T z) {
  return z >= 0 ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
}

void require_rank(const Shape& s, int rank, const std::string& who) {
  if (static_cast<int>(s.size()) != rank) {
    throw Error("shape", who + " expects rank " + std::to_string(rank) + " input, got " + shape_str(s));
  }
}

}  // namespace

// --- Conv2D ---------------------------------------------------------------

template <typename T>
Conv2D<T>::Conv2D(std::string name, int in_channels, int out_channels, int kernel_size, Rng& rng, bool bias_on)
    : kernel(name + ".kernel", Tensor<T>({kernel_size, kernel_size, in_channels, out_channels})),
      bias(name + ".bias", Tensor<T>({out_channels})),
      has_bias(bias_on),
      cin_(in_channels),
      cout_(out_channels),
      k_(kernel_size) {
  if (kernel_size % 2 == 0) throw Error("shape", "conv2d kernel size must be odd");
  he_normal(kernel.value, kernel_size * kernel_size * in_channels, rng);
}

template <typename T>
std::vector<Param<T>*> Conv2D<T>::params() {
  if (has_bias) return {&kernel, &bias};
  return {&kernel};
}

template <typename T>
Tensor<T> Conv2D<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 4, "conv2d");
  if (x.dim(3) != cin_) {
    throw Error("shape", "conv2d expects " + std::to_string(cin_) + " input channels, got " + shape_str(x.shape));
  }
  input_ = x;
  const int N = x.dim(0), H = x.dim(1), W = x.dim(2), pad = k_ / 2;
  Tensor<T> out({N, H, W, cout_});
  const T* K = kernel.value.ptr();
  for (int n = 0; n < N; ++n) {
    for (int y = 0; y < H; ++y) {
      for (int xx = 0; xx < W; ++xx) {
        T* o = out.ptr() + ((static_cast<std::size_t>(n) * H + y) * W + xx) * cout_;
        if (has_bias) std::copy(bias.value.ptr(), bias.value.ptr() + cout_, o);
        for (int ky = 0; ky < k_; ++ky) {
          const int iy = y + ky - pad;
          if (iy < 0 || iy >= H) continue;
          for (int kx = 0; kx < k_; ++kx) {
            const int ix = xx + kx - pad;
            if (ix < 0 || ix >= W) continue;
            const T* in = x.ptr() + ((static_cast<std::size_t>(n) * H + iy) * W + ix) * cin_;
            const T* kk = K + (static_cast<std::size_t>(ky) * k_ + kx) * cin_ * cout_;
            for (int ci = 0; ci < cin_; ++ci) {
              const T v = in[ci];
              if (v == T(0)) continue;
              const T* kr = kk + static_cast<std::size_t>(ci) * cout_;
              for (int co = 0; co < cout_; ++co) o[co] += v * kr[co];
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> Conv2D<T>::backward(const Tensor<T>& g) {
  const Tensor<T>& x = input_;
  const int N = x.dim(0), H = x.dim(1), W = x.dim(2), pad = k_ / 2;
  Tensor<T> dx(x.shape);
  const T* K = kernel.value.ptr();
  T* dK = kernel.grad.ptr();
  for (int n = 0; n < N; ++n) {
    for (int y = 0; y < H; ++y) {
      for (int xx = 0; xx < W; ++xx) {
        const T* go = g.ptr() + ((static_cast<std::size_t>(n) * H + y) * W + xx) * cout_;
        if (has_bias) {
          for (int co = 0; co < cout_; ++co) bias.grad[co] += go[co];
        }
        for (int ky = 0; ky < k_; ++ky) {
          const int iy = y + ky - pad;
          if (iy < 0 || iy >= H) continue;
          for (int kx = 0; kx < k_; ++kx) {
            const int ix = xx + kx - pad;
            if (ix < 0 || ix >= W) continue;
            const std::size_t in_off = ((static_cast<std::size_t>(n) * H + iy) * W + ix) * cin_;
            const T* in = x.ptr() + in_off;
            T* din = dx.ptr() + in_off;
            const std::size_t k_off = (static_cast<std::size_t>(ky) * k_ + kx) * cin_ * cout_;
            for (int ci = 0; ci < cin_; ++ci) {
              const T* kr = K + k_off + static_cast<std::size_t>(ci) * cout_;
              T* dkr = dK + k_off + static_cast<std::size_t>(ci) * cout_;
              const T v = in[ci];
              T acc = 0;
              for (int co = 0; co < cout_; ++co) {
                acc += go[co] * kr[co];
                dkr[co] += v * go[co];
              }
              din[ci] += acc;
            }
          }
        }
      }
    }
  }
  return dx;
}

// --- ReLU -----------------------------------------------------------------

template <typename T>
Tensor<T> ReLU<T>::forward(const Tensor<T>& x, bool) {
  input_ = x;
  Tensor<T> out = x;
  for (T& v : out.data) v = v > T(0) ? v : T(0);
  return out;
}

template <typename T>
Tensor<T> ReLU<T>::backward(const Tensor<T>& g) {
  Tensor<T> dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(input_[i] > T(0))) dx[i] = T(0);
  }
  return dx;
}

// --- MaxPool2D --------------------------------------------------------------

template <typename T>
Tensor<T> MaxPool2D<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 4, "maxpool2d");
  in_shape_ = x.shape;
  const int N = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  const int OH = (H + 1) / 2, OW = (W + 1) / 2;
  Tensor<T> out({N, OH, OW, C});
  argmax_.assign(out.size(), 0);
  for (int n = 0; n < N; ++n) {
    for (int oy = 0; oy < OH; ++oy) {
      for (int ox = 0; ox < OW; ++ox) {
        for (int c = 0; c < C; ++c) {
          T best = -std::numeric_limits<T>::infinity();
          std::size_t best_idx = 0;
          bool found = false;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const int iy = 2 * oy + dy, ix = 2 * ox + dx;
              if (iy >= H || ix >= W) continue;  // -inf padding never wins
              const std::size_t idx = ((static_cast<std::size_t>(n) * H + iy) * W + ix) * C + c;
              if (!found || x[idx] > best) {
                best = x[idx];
                best_idx = idx;
                found = true;
              }
            }
          }
          const std::size_t o = ((static_cast<std::size_t>(n) * OH + oy) * OW + ox) * C + c;
          out[o] = best;
          argmax_[o] = best_idx;
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> MaxPool2D<T>::backward(const Tensor<T>& g) {
  Tensor<T> dx(in_shape_);
  for (std::size_t o = 0; o < g.size(); ++o) dx[argmax_[o]] += g[o];
  return dx;
}

// --- BatchNorm --------------------------------------------------------------

template <typename T>
BatchNorm<T>::BatchNorm(std::string name, int channels, double mom, double epsilon)
    : gamma(name + ".gamma", Tensor<T>({channels}, T(1))),
      beta(name + ".beta", Tensor<T>({channels})),
      running_mean(name + ".running_mean", Tensor<T>({channels})),
      running_var(name + ".running_var", Tensor<T>({channels}, T(1))),
      momentum(mom),
      eps(epsilon),
      c_(channels) {}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, bool train) {
  if (x.dim(-1) != c_) throw Error("shape", "batchnorm expects " + std::to_string(c_) + " channels, got " + shape_str(x.shape));
  const std::size_t M = x.size() / c_;
  last_train_ = train;
  std::vector<T> mean(c_, T(0)), var(c_, T(0));
  if (train) {
    for (std::size_t i = 0; i < M; ++i)
      for (int c = 0; c < c_; ++c) mean[c] += x[i * c_ + c];
    for (int c = 0; c < c_; ++c) mean[c] /= static_cast<T>(M);
    for (std::size_t i = 0; i < M; ++i)
      for (int c = 0; c < c_; ++c) {
        const T d = x[i * c_ + c] - mean[c];
        var[c] += d * d;
      }
    for (int c = 0; c < c_; ++c) {
      var[c] /= static_cast<T>(M);
      running_mean.value[c] = static_cast<T>(momentum * running_mean.value[c] + (1.0 - momentum) * mean[c]);
      running_var.value[c] = static_cast<T>(momentum * running_var.value[c] + (1.0 - momentum) * var[c]);
    }
  } else {
    for (int c = 0; c < c_; ++c) {
      mean[c] = running_mean.value[c];
      var[c] = running_var.value[c];
    }
  }
  inv_std_.resize(c_);
  for (int c = 0; c < c_; ++c) inv_std_[c] = T(1) / std::sqrt(var[c] + static_cast<T>(eps));
  xhat_ = Tensor<T>(x.shape);
  Tensor<T> out(x.shape);
  for (std::size_t i = 0; i < M; ++i) {
    for (int c = 0; c < c_; ++c) {
      const std::size_t k = i * c_ + c;
      xhat_[k] = (x[k] - mean[c]) * inv_std_[c];
      out[k] = gamma.value[c] * xhat_[k] + beta.value[c];
    }
  }
  return out;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& g) {
  const std::size_t M = g.size() / c_;
  std::vector<T> sum_g(c_, T(0)), sum_gx(c_, T(0));
  for (std::size_t i = 0; i < M; ++i) {
    for (int c = 0; c < c_; ++c) {
      const std::size_t k = i * c_ + c;
      sum_g[c] += g[k];
      sum_gx[c] += g[k] * xhat_[k];
    }
  }
  for (int c = 0; c < c_; ++c) {
    gamma.grad[c] += sum_gx[c];
    beta.grad[c] += sum_g[c];
  }
  Tensor<T> dx(g.shape);
  const T m = static_cast<T>(M);
  for (std::size_t i = 0; i < M; ++i) {
    for (int c = 0; c < c_; ++c) {
      const std::size_t k = i * c_ + c;
      const T scale = gamma.value[c] * inv_std_[c];
      dx[k] = last_train_ ? scale / m * (m * g[k] - sum_g[c] - xhat_[k] * sum_gx[c]) : scale * g[k];
    }
  }
  return dx;
}

// --- Dense --------------------------------------------------------------------

template <typename T>
Dense<T>::Dense(std::string name, int in, int out, Activation act, Rng& rng)
    : weight(name + ".weight", Tensor<T>({in, out})),
      bias(name + ".bias", Tensor<T>({out})),
      activation(act),
      in_(in),
      out_(out) {
  he_normal(weight.value, in, rng, act == Activation::Relu ? 2.0 : 1.0);
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 2, "dense");
  if (x.dim(1) != in_) {
    throw Error("shape", "dense expects " + std::to_string(in_) + " features, got " + shape_str(x.shape));
  }
  input_ = x;
  const int N = x.dim(0);
  Tensor<T> out({N, out_});
  const T* Wp = weight.value.ptr();
  for (int n = 0; n < N; ++n) {
    T* o = out.ptr() + static_cast<std::size_t>(n) * out_;
    std::copy(bias.value.ptr(), bias.value.ptr() + out_, o);
    const T* xi = x.ptr() + static_cast<std::size_t>(n) * in_;
    for (int i = 0; i < in_; ++i) {
      const T v = xi[i];
      if (v == T(0)) continue;
      const T* wr = Wp + static_cast<std::size_t>(i) * out_;
      for (int j = 0; j < out_; ++j) o[j] += v * wr[j];
    }
  }
  if (activation == Activation::Relu) {
    for (T& v : out.data) v = v > T(0) ? v : T(0);
  } else if (activation == Activation::Sigmoid) {
    for (T& v : out.data) v = sigmoid(v);
  }
  output_ = out;
  return out;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& g) {
  const int N = input_.dim(0);
  Tensor<T> dz = g;
  if (activation == Activation::Relu) {
    for (std::size_t i = 0; i < dz.size(); ++i) {
      if (!(output_[i] > T(0))) dz[i] = T(0);
    }
  } else if (activation == Activation::Sigmoid) {
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] *= output_[i] * (T(1) - output_[i]);
  }
  Tensor<T> dx({N, in_});
  const T* Wp = weight.value.ptr();
  T* dW = weight.grad.ptr();
  for (int n = 0; n < N; ++n) {
    const T* gz = dz.ptr() + static_cast<std::size_t>(n) * out_;
    const T* xi = input_.ptr() + static_cast<std::size_t>(n) * in_;
    T* dxi = dx.ptr() + static_cast<std::size_t>(n) * in_;
    for (int j = 0; j < out_; ++j) bias.grad[j] += gz[j];
    for (int i = 0; i < in_; ++i) {
      const T* wr = Wp + static_cast<std::size_t>(i) * out_;
      T* dwr = dW + static_cast<std::size_t>(i) * out_;
      const T v = xi[i];
      T acc = 0;
      for (int j = 0; j < out_; ++j) {
        acc += gz[j] * wr[j];
        dwr[j] += v * gz[j];
      }
      dxi[i] = acc;
    }
  }
  return dx;
}

// --- Dropout ------------------------------------------------------------------

template <typename T>
Dropout<T>::Dropout(double prob, std::uint64_t seed) : p(prob), rng_(seed) {
  if (!(prob >= 0.0 && prob < 1.0)) throw Error("config", "dropout p must be in [0,1)");
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, bool train) {
  masked_ = train && p > 0.0;
  if (!masked_) return x;
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  mask_.resize(x.size());
  Tensor<T> out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = uniform01(rng_) < p ? T(0) : scale;
    out[i] *= mask_[i];
  }
  return out;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& g) {
  if (!masked_) return g;
  Tensor<T> dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask_[i];
  return dx;
}

// --- Flatten ------------------------------------------------------------------

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x, bool) {
  in_shape_ = x.shape;
  return x.reshaped({x.dim(0), static_cast<int>(x.size() / x.dim(0))});
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& g) {
  return g.reshaped(in_shape_);
}

// --- LSTM -----------------------------------------------------------------------

template <typename T>
LSTM<T>::LSTM(std::string name, int input_size, int units, Rng& rng)
    : w(name + ".w", Tensor<T>({input_size, 4 * units})),
      u(name + ".u", Tensor<T>({units, 4 * units})),
      b(name + ".b", Tensor<T>({4 * units})),
      d_(input_size),
      units_(units) {
  const double a = 1.0 / std::sqrt(static_cast<double>(units));
  for (T& v : w.value.data) v = static_cast<T>(uniform(rng, -a, a));
  for (T& v : u.value.data) v = static_cast<T>(uniform(rng, -a, a));
  for (int j = 0; j < units; ++j) b.value[units + j] = T(1);  // forget gate
}

template <typename T>
Tensor<T> LSTM<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 3, "lstm");
  if (x.dim(2) != d_) {
    throw Error("shape", "lstm expects " + std::to_string(d_) + " features, got " + shape_str(x.shape));
  }
  if (x.dim(1) == 0) throw Error("shape", "lstm requires at least one time step");
  x_ = x;
  const int N = x.dim(0), Tn = x.dim(1), U = units_, G = 4 * units_;
  gates_ = Tensor<T>({Tn, N, G});
  cs_ = Tensor<T>({Tn, N, U});
  hs_ = Tensor<T>({N, Tn, U});
  std::vector<T> z(G);
  for (int t = 0; t < Tn; ++t) {
    for (int n = 0; n < N; ++n) {
      std::copy(b.value.ptr(), b.value.ptr() + G, z.begin());
      const T* xt = x.ptr() + (static_cast<std::size_t>(n) * Tn + t) * d_;
      for (int d = 0; d < d_; ++d) {
        const T v = xt[d];
        if (v == T(0)) continue;
        const T* wr = w.value.ptr() + static_cast<std::size_t>(d) * G;
        for (int k = 0; k < G; ++k) z[k] += v * wr[k];
      }
      if (t > 0) {
        const T* hp = hs_.ptr() + (static_cast<std::size_t>(n) * Tn + t - 1) * U;
        for (int j = 0; j < U; ++j) {
          const T v = hp[j];
          const T* ur = u.value.ptr() + static_cast<std::size_t>(j) * G;
          for (int k = 0; k < G; ++k) z[k] += v * ur[k];
        }
      }
      T* ga = gates_.ptr() + (static_cast<std::size_t>(t) * N + n) * G;
      T* c = cs_.ptr() + (static_cast<std::size_t>(t) * N + n) * U;
      T* h = hs_.ptr() + (static_cast<std::size_t>(n) * Tn + t) * U;
      const T* cprev = t > 0 ? cs_.ptr() + (static_cast<std::size_t>(t - 1) * N + n) * U : nullptr;
      for (int j = 0; j < U; ++j) {
        const T i = sigmoid(z[j]);
        const T f = sigmoid(z[U + j]);
        const T g = std::tanh(z[2 * U + j]);
        const T o = sigmoid(z[3 * U + j]);
        ga[j] = i;
        ga[U + j] = f;
        ga[2 * U + j] = g;
        ga[3 * U + j] = o;
        c[j] = (cprev ? f * cprev[j] : T(0)) + i * g;
        h[j] = o * std::tanh(c[j]);
      }
    }
  }
  Tensor<T> out({N, U});
  for (int n = 0; n < N; ++n) {
    std::copy_n(hs_.ptr() + (static_cast<std::size_t>(n) * Tn + Tn - 1) * U, U, out.ptr() + static_cast<std::size_t>(n) * U);
  }
  return out;
}

template <typename T>
Tensor<T> LSTM<T>::backward(const Tensor<T>& grad_out) {
  const int N = x_.dim(0), Tn = x_.dim(1), U = units_, G = 4 * units_;
  Tensor<T> dx(x_.shape);
  Tensor<T> dh = grad_out;  // [N,U]
  Tensor<T> dc({N, U});
  Tensor<T> dh_prev({N, U});
  std::vector<T> dz(G);
  for (int t = Tn - 1; t >= 0; --t) {
    dh_prev.fill(T(0));
    for (int n = 0; n < N; ++n) {
      const T* ga = gates_.ptr() + (static_cast<std::size_t>(t) * N + n) * G;
      const T* c = cs_.ptr() + (static_cast<std::size_t>(t) * N + n) * U;
      const T* cprev = t > 0 ? cs_.ptr() + (static_cast<std::size_t>(t - 1) * N + n) * U : nullptr;
      T* dcn = dc.ptr() + static_cast<std::size_t>(n) * U;
      const T* dhn = dh.ptr() + static_cast<std::size_t>(n) * U;
      for (int j = 0; j < U; ++j) {
        const T i = ga[j], f = ga[U + j], g = ga[2 * U + j], o = ga[3 * U + j];
        const T tc = std::tanh(c[j]);
        const T d_o = dhn[j] * tc;
        const T dcj = dcn[j] + dhn[j] * o * (T(1) - tc * tc);
        const T d_i = dcj * g;
        const T d_g = dcj * i;
        const T d_f = cprev ? dcj * cprev[j] : T(0);
        dcn[j] = dcj * f;  // becomes dc for step t-1
        dz[j] = d_i * i * (T(1) - i);
        dz[U + j] = d_f * f * (T(1) - f);
        dz[2 * U + j] = d_g * (T(1) - g * g);
        dz[3 * U + j] = d_o * o * (T(1) - o);
      }
      for (int k = 0; k < G; ++k) b.grad[k] += dz[k];
      const T* xt = x_.ptr() + (static_cast<std::size_t>(n) * Tn + t) * d_;
      T* dxt = dx.ptr() + (static_cast<std::size_t>(n) * Tn + t) * d_;
      for (int d = 0; d < d_; ++d) {
        const T* wr = w.value.ptr() + static_cast<std::size_t>(d) * G;
        T* dwr = w.grad.ptr() + static_cast<std::size_t>(d) * G;
        T acc = 0;
        for (int k = 0; k < G; ++k) {
          acc += dz[k] * wr[k];
          dwr[k] += xt[d] * dz[k];
        }
        dxt[d] = acc;
      }
      if (t > 0) {
        const T* hp = hs_.ptr() + (static_cast<std::size_t>(n) * Tn + t - 1) * U;
        T* dhp = dh_prev.ptr() + static_cast<std::size_t>(n) * U;
        for (int j = 0; j < U; ++j) {
          const T* ur = u.value.ptr() + static_cast<std::size_t>(j) * G;
          T* dur = u.grad.ptr() + static_cast<std::size_t>(j) * G;
          T acc = 0;
          for (int k = 0; k < G; ++k) {
            acc += dz[k] * ur[k];
            dur[k] += hp[j] * dz[k];
          }
          dhp[j] = acc;
        }
      }
    }
    std::swap(dh, dh_prev);
  }
  return dx;
}

// --- TemporalMean ----------------------------------------------------------------

template <typename T>
Tensor<T> TemporalMean<T>::forward(const Tensor<T>& x, bool) {
  require_rank(x.shape, 3, "temporal_mean");
  in_shape_ = x.shape;
  const int N = x.dim(0), Tn = x.dim(1), F = x.dim(2);
  Tensor<T> out({N, F});
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < Tn; ++t)
      for (int f = 0; f < F; ++f) out[static_cast<std::size_t>(n) * F + f] += x[(static_cast<std::size_t>(n) * Tn + t) * F + f];
  for (T& v : out.data) v /= static_cast<T>(Tn);
  return out;
}

template <typename T>
Tensor<T> TemporalMean<T>::backward(const Tensor<T>& g) {
  const int N = in_shape_[0], Tn = in_shape_[1], F = in_shape_[2];
  Tensor<T> dx(in_shape_);
  for (int n = 0; n < N; ++n)
    for (int t = 0; t < Tn; ++t)
      for (int f = 0; f < F; ++f)
        dx[(static_cast<std::size_t>(n) * Tn + t) * F + f] = g[static_cast<std::size_t>(n) * F + f] / static_cast<T>(Tn);
  return dx;
}

// --- Sequential -------------------------------------------------------------------

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x, bool train) {
  Tensor<T> h = x;
  for (auto& l : layers) {
    h = l->forward(h, train);
    check_finite(h, l->kind() + " output");
  }
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> g = grad_out;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
std::vector<Param<T>*> Sequential<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& l : layers) {
    for (Param<T>* p : l->params()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<Param<T>*> Sequential<T>::buffers() {
  std::vector<Param<T>*> out;
  for (auto& l : layers) {
    for (Param<T>* p : l->buffers()) out.push_back(p);
  }
  return out;
}

template <typename T>
void Sequential<T>::reseed(std::uint64_t seed) {
  for (size_t i = 0; i < layers.size(); ++i) layers[i]->reseed(mix_seed(seed, i));
}

// --- TimeDistributed -------------------------------------------------------------

template <typename T>
Tensor<T> TimeDistributed<T>::forward(const Tensor<T>& x, bool train) {
  if (x.rank() < 3) throw Error("shape", "time_distributed expects [N,T,...], got " + shape_str(x.shape));
  n_ = x.dim(0);
  t_ = x.dim(1);
  Shape folded(x.shape.begin() + 1, x.shape.end());
  folded[0] = n_ * t_;
  Tensor<T> y = inner->forward(x.reshaped(folded), train);
  Shape unfolded = {n_, t_};
  unfolded.insert(unfolded.end(), y.shape.begin() + 1, y.shape.end());
  y.reshape(unfolded);
  return y;
}

template <typename T>
Tensor<T> TimeDistributed<T>::backward(const Tensor<T>& grad_out) {
  Shape folded(grad_out.shape.begin() + 1, grad_out.shape.end());
  folded[0] = n_ * t_;
  Tensor<T> dx = inner->backward(grad_out.reshaped(folded));
  Shape unfolded = {n_, t_};
  unfolded.insert(unfolded.end(), dx.shape.begin() + 1, dx.shape.end());
  dx.reshape(unfolded);
  return dx;
}

#define BOTSENSE_INSTANTIATE(T) \
  template class Conv2D<T>;     \
  template class ReLU<T>;       \
  template class MaxPool2D<T>;  \
  template class BatchNorm<T>;  \
  template class Dense<T>;      \
  template class Dropout<T>;    \
  template class Flatten<T>;    \
  template class LSTM<T>;       \
  template class TemporalMean<T>; \
  template class Sequential<T>; \
  template class TimeDistributed<T>;

BOTSENSE_INSTANTIATE(float)
BOTSENSE_INSTANTIATE(double)

}  // namespace botsense
