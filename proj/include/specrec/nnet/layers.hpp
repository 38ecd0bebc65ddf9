#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "specrec/nnet/tensor.hpp"
#include "specrec/rng.hpp"

namespace specrec::nn {

// Layers operate on batch-major flat buffers. forward(cache=true) records
// whatever backward needs; backward accumulates parameter gradients and
// writes input gradients. Calling backward without a cached forward throws
// NoForwardContext.

struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  Tensor w;  // [out, in]
  Tensor b;  // [out]

  void init(std::size_t in_dim, std::size_t out_dim, Rng& rng);
  // x [batch, in] -> y [batch, out]
  void forward(const double* x, double* y, std::size_t batch, bool cache);
  // dy [batch, out] -> dx [batch, in]; accumulates w.grad, b.grad
  void backward(const double* dy, double* dx, std::size_t batch);

 private:
  std::vector<double> x_cache_;
  std::size_t cached_batch_ = 0;
};

struct Relu {
  void forward(const double* x, double* y, std::size_t n, bool cache);
  void backward(const double* dy, double* dx, std::size_t n) const;

 private:
  std::vector<double> y_cache_;
  bool have_cache_ = false;
};

struct Sigmoid {
  void forward(const double* x, double* y, std::size_t n, bool cache);
  void backward(const double* dy, double* dx, std::size_t n) const;

 private:
  std::vector<double> y_cache_;
  bool have_cache_ = false;
};

// Inverted dropout: survivors are scaled by 1/(1-p) at train time so the
// eval path needs no rescaling.
struct Dropout {
  double p = 0.0;

  void forward(const double* x, double* y, std::size_t n, bool train, Rng* rng);
  void backward(const double* dy, double* dx, std::size_t n) const;

 private:
  std::vector<double> mask_;  // 0 or 1/(1-p)
  bool have_cache_ = false;
};

// 1D convolution with same padding (odd kernel), computed as an im2col
// matrix product. Activations are [batch, channels, length] row-major.
struct Conv1d {
  std::size_t in_ch = 0;
  std::size_t out_ch = 0;
  std::size_t ksize = 0;
  Tensor w;  // [out_ch, in_ch, ksize]
  Tensor b;  // [out_ch]

  void init(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
            Rng& rng);
  void forward(const double* x, double* y, std::size_t batch, std::size_t len,
               bool cache);
  void backward(const double* dy, double* dx, std::size_t batch, std::size_t len);

 private:
  void im2col(const double* x, std::size_t batch, std::size_t len);
  std::vector<double> cols_;     // [batch*len, in_ch*ksize]
  std::vector<double> rows_;     // [batch*len, out_ch] scratch
  std::vector<double> dcols_;
  std::size_t cached_batch_ = 0;
  std::size_t cached_len_ = 0;
};

// Non-overlapping max pooling; the remainder of the signal is dropped.
// Gradient is routed to the argmax position only (first index on ties).
struct MaxPool1d {
  std::size_t width = 2;

  static std::size_t out_len(std::size_t len, std::size_t width) { return len / width; }
  void forward(const double* x, double* y, std::size_t batch, std::size_t channels,
               std::size_t len, bool cache);
  void backward(const double* dy, double* dx, std::size_t batch, std::size_t channels,
                std::size_t len) const;

 private:
  std::vector<std::uint32_t> argmax_;  // flat input index per output cell
  bool have_cache_ = false;
};

}  // namespace specrec::nn
