#include "specrec/nnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "specrec/nnet/linalg.hpp"

namespace specrec::nn {

namespace {

// uniform fan-in scheme: U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero
void fill_fan_in(Tensor& w, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : w.data) v = rng.uniform(-bound, bound);
}

}  // namespace

void Linear::init(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  in = in_dim;
  out = out_dim;
  w = Tensor::zeros({out, in}, true);
  b = Tensor::zeros({out}, true);
  fill_fan_in(w, in, rng);
}

void Linear::forward(const double* x, double* y, std::size_t batch, bool cache) {
  linalg::gemm_nt(x, w.data.data(), y, batch, in, out);
  for (std::size_t i = 0; i < batch; ++i) {
    double* row = y + i * out;
    for (std::size_t j = 0; j < out; ++j) row[j] += b.data[j];
  }
  if (cache) {
    x_cache_.assign(x, x + batch * in);
    cached_batch_ = batch;
  }
}

void Linear::backward(const double* dy, double* dx, std::size_t batch) {
  if (cached_batch_ != batch || x_cache_.size() != batch * in)
    throw NoForwardContext("Linear::backward without matching cached forward");
  // dW += dy^T x, db += column sums, dx = dy W
  linalg::gemm_tn_acc(dy, x_cache_.data(), w.grad.data(), out, batch, in);
  for (std::size_t i = 0; i < batch; ++i) {
    const double* row = dy + i * out;
    for (std::size_t j = 0; j < out; ++j) b.grad[j] += row[j];
  }
  linalg::gemm_nn(dy, w.data.data(), dx, batch, out, in);
}

void Relu::forward(const double* x, double* y, std::size_t n, bool cache) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  if (cache) {
    y_cache_.assign(y, y + n);
    have_cache_ = true;
  }
}

void Relu::backward(const double* dy, double* dx, std::size_t n) const {
  if (!have_cache_ || y_cache_.size() != n)
    throw NoForwardContext("Relu::backward without matching cached forward");
  for (std::size_t i = 0; i < n; ++i) dx[i] = y_cache_[i] > 0.0 ? dy[i] : 0.0;
}

void Sigmoid::forward(const double* x, double* y, std::size_t n, bool cache) {
  for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
  if (cache) {
    y_cache_.assign(y, y + n);
    have_cache_ = true;
  }
}

void Sigmoid::backward(const double* dy, double* dx, std::size_t n) const {
  if (!have_cache_ || y_cache_.size() != n)
    throw NoForwardContext("Sigmoid::backward without matching cached forward");
  for (std::size_t i = 0; i < n; ++i) {
    const double s = y_cache_[i];
    dx[i] = dy[i] * s * (1.0 - s);
  }
}

void Dropout::forward(const double* x, double* y, std::size_t n, bool train,
                      Rng* rng) {
  if (!train || p <= 0.0) {
    if (y != x) std::memcpy(y, x, n * sizeof(double));
    mask_.assign(n, 1.0);
    have_cache_ = true;
    return;
  }
  if (rng == nullptr)
    throw InvalidArgument("Dropout needs an rng in train mode");
  const double keep_scale = 1.0 / (1.0 - p);
  mask_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    mask_[i] = (rng->next_unit() >= p) ? keep_scale : 0.0;
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * mask_[i];
  have_cache_ = true;
}

void Dropout::backward(const double* dy, double* dx, std::size_t n) const {
  if (!have_cache_ || mask_.size() != n)
    throw NoForwardContext("Dropout::backward without matching cached forward");
  for (std::size_t i = 0; i < n; ++i) dx[i] = dy[i] * mask_[i];
}

void Conv1d::init(std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel, Rng& rng) {
  if (kernel % 2 == 0) throw InvalidArgument("conv kernel must be odd");
  in_ch = in_channels;
  out_ch = out_channels;
  ksize = kernel;
  w = Tensor::zeros({out_ch, in_ch, ksize}, true);
  b = Tensor::zeros({out_ch}, true);
  fill_fan_in(w, in_ch * ksize, rng);
}

void Conv1d::im2col(const double* x, std::size_t batch, std::size_t len) {
  const std::size_t pad = (ksize - 1) / 2;
  const std::size_t kcols = in_ch * ksize;
  cols_.assign(batch * len * kcols, 0.0);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    const double* xb = x + bi * in_ch * len;
    double* cb = cols_.data() + bi * len * kcols;
    for (std::size_t l = 0; l < len; ++l) {
      double* crow = cb + l * kcols;
      for (std::size_t c = 0; c < in_ch; ++c) {
        const double* xc = xb + c * len;
        for (std::size_t t = 0; t < ksize; ++t) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(l + t) -
                                     static_cast<std::ptrdiff_t>(pad);
          if (src >= 0 && src < static_cast<std::ptrdiff_t>(len))
            crow[c * ksize + t] = xc[src];
        }
      }
    }
  }
}

void Conv1d::forward(const double* x, double* y, std::size_t batch, std::size_t len,
                     bool cache) {
  const std::size_t kcols = in_ch * ksize;
  im2col(x, batch, len);
  rows_.resize(batch * len * out_ch);
  // rows[b*len + l, oc] = cols . w[oc, :]
  linalg::gemm_nt(cols_.data(), w.data.data(), rows_.data(), batch * len, kcols,
                  out_ch);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    double* yb = y + bi * out_ch * len;
    const double* rb = rows_.data() + bi * len * out_ch;
    for (std::size_t oc = 0; oc < out_ch; ++oc) {
      double* yrow = yb + oc * len;
      const double bias = b.data[oc];
      for (std::size_t l = 0; l < len; ++l) yrow[l] = rb[l * out_ch + oc] + bias;
    }
  }
  if (cache) {
    cached_batch_ = batch;
    cached_len_ = len;
  } else {
    cached_batch_ = cached_len_ = 0;
  }
}

void Conv1d::backward(const double* dy, double* dx, std::size_t batch,
                      std::size_t len) {
  if (cached_batch_ != batch || cached_len_ != len)
    throw NoForwardContext("Conv1d::backward without matching cached forward");
  const std::size_t pad = (ksize - 1) / 2;
  const std::size_t kcols = in_ch * ksize;

  // regroup dy as [batch*len, out_ch]
  rows_.resize(batch * len * out_ch);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    const double* db = dy + bi * out_ch * len;
    double* rb = rows_.data() + bi * len * out_ch;
    for (std::size_t oc = 0; oc < out_ch; ++oc) {
      const double* drow = db + oc * len;
      double grad_b = 0.0;
      for (std::size_t l = 0; l < len; ++l) {
        rb[l * out_ch + oc] = drow[l];
        grad_b += drow[l];
      }
      b.grad[oc] += grad_b;
    }
  }

  // dW += rows^T cols
  linalg::gemm_tn_acc(rows_.data(), cols_.data(), w.grad.data(), out_ch,
                      batch * len, kcols);

  // dcols = rows W, then scatter back (col2im)
  dcols_.resize(batch * len * kcols);
  linalg::gemm_nn(rows_.data(), w.data.data(), dcols_.data(), batch * len, out_ch,
                  kcols);
  std::memset(dx, 0, batch * in_ch * len * sizeof(double));
  for (std::size_t bi = 0; bi < batch; ++bi) {
    double* xb = dx + bi * in_ch * len;
    const double* cb = dcols_.data() + bi * len * kcols;
    for (std::size_t l = 0; l < len; ++l) {
      const double* crow = cb + l * kcols;
      for (std::size_t c = 0; c < in_ch; ++c) {
        double* xc = xb + c * len;
        for (std::size_t t = 0; t < ksize; ++t) {
          const std::ptrdiff_t dst = static_cast<std::ptrdiff_t>(l + t) -
                                     static_cast<std::ptrdiff_t>(pad);
          if (dst >= 0 && dst < static_cast<std::ptrdiff_t>(len))
            xc[dst] += crow[c * ksize + t];
        }
      }
    }
  }
}

void MaxPool1d::forward(const double* x, double* y, std::size_t batch,
                        std::size_t channels, std::size_t len, bool cache) {
  const std::size_t lo = out_len(len, width);
  argmax_.resize(batch * channels * lo);
  for (std::size_t bc = 0; bc < batch * channels; ++bc) {
    const double* xr = x + bc * len;
    double* yr = y + bc * lo;
    std::uint32_t* ar = argmax_.data() + bc * lo;
    for (std::size_t o = 0; o < lo; ++o) {
      const std::size_t base = o * width;
      std::size_t best = base;
      double best_v = xr[base];
      for (std::size_t t = 1; t < width; ++t) {
        if (xr[base + t] > best_v) {  // strict: first max wins ties
          best_v = xr[base + t];
          best = base + t;
        }
      }
      yr[o] = best_v;
      ar[o] = static_cast<std::uint32_t>(best);
    }
  }
  have_cache_ = cache;
}

void MaxPool1d::backward(const double* dy, double* dx, std::size_t batch,
                         std::size_t channels, std::size_t len) const {
  const std::size_t lo = out_len(len, width);
  if (!have_cache_ || argmax_.size() != batch * channels * lo)
    throw NoForwardContext("MaxPool1d::backward without matching cached forward");
  std::memset(dx, 0, batch * channels * len * sizeof(double));
  for (std::size_t bc = 0; bc < batch * channels; ++bc) {
    const double* dyr = dy + bc * lo;
    double* dxr = dx + bc * len;
    const std::uint32_t* ar = argmax_.data() + bc * lo;
    for (std::size_t o = 0; o < lo; ++o) dxr[ar[o]] += dyr[o];
  }
}

}  // namespace specrec::nn
