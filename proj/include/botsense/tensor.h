#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "botsense/error.h"

namespace botsense {

using Shape = std::vector<int>;

inline std::size_t shape_count(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

// Dense row-major array. T is float for training and double for gradient
// checks.
template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(shape_count(shape), fill) {
    for (int d : shape) {
      if (d <= 0) throw Error("shape", "tensor dimensions must be positive, got " + shape_str(shape));
    }
  }
  Tensor(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_count(shape)) {
      throw Error("shape", "data length " + std::to_string(data.size()) + " does not match " + shape_str(shape));
    }
  }

  std::size_t size() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[i < 0 ? shape.size() + i : i]; }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  void reshape(Shape s) {
    if (shape_count(s) != data.size()) {
      throw Error("shape", "cannot reshape " + shape_str(shape) + " to " + shape_str(s));
    }
    shape = std::move(s);
  }
  Tensor reshaped(Shape s) const {
    Tensor t = *this;
    t.reshape(std::move(s));
    return t;
  }
  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Throws Error("numeric") naming `where` on the first NaN or Inf.
template <typename T>
void check_finite(const Tensor<T>& t, const std::string& where) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t.data[i])) {
      throw Error("numeric", "non-finite value at index " + std::to_string(i) + " of " + where + " " +
                                 shape_str(t.shape));
    }
  }
}

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  Tensor<To> out;
  out.shape = t.shape;
  out.data.assign(t.data.begin(), t.data.end());
  return out;
}

}  // namespace botsense
