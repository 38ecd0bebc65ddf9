#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "specrec/errors.hpp"

namespace specrec::nn {

// Flat f64 array with a shape and an optional gradient of the same size.
// Parameters carry grads; activations use bare buffers inside the layers.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;

  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape, bool with_grad = false) {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(t.numel_from_shape(), 0.0);
    if (with_grad) t.grad.assign(t.data.size(), 0.0);
    return t;
  }

  std::size_t numel_from_shape() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  std::size_t size() const { return data.size(); }

  void zero_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    else std::fill(grad.begin(), grad.end(), 0.0);
  }

  void check() const {
    if (data.size() != numel_from_shape())
      throw DimensionMismatch("tensor data length does not match its shape");
    if (!grad.empty() && grad.size() != data.size())
      throw DimensionMismatch("tensor grad length does not match its data");
  }
};

}  // namespace specrec::nn
