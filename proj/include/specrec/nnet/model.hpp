#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "specrec/nnet/layers.hpp"
#include "specrec/rng.hpp"
#include "specrec/types.hpp"

namespace specrec::nn {

// Reconstruction network topology: a coarse fully-connected module
// (rec_fc), a convolutional feature module, a refining fully-connected
// module (rf_fc), a residual connection from rec_fc to rf_fc, and a final
// sigmoid. Widths are configurable; defaults are sized for K=16, L=206.
struct RespecArch {
  std::size_t input_dim = 16;   // K
  std::size_t output_dim = 206; // L
  std::vector<std::size_t> rec_fc_dims = {256, 512};
  double dropout_p = 0.2;
  std::vector<std::size_t> conv_channels = {8, 16, 32};
  std::size_t conv_kernel = 5;
  std::size_t pool_width = 2;
  std::vector<std::size_t> rf_fc_dims = {512};

  void validate() const;
  std::size_t pooled_len() const;
  std::size_t flattened_dim() const { return conv_channels.back() * pooled_len(); }

  bool operator==(const RespecArch&) const = default;
};

class RespecNet {
 public:
  RespecNet(const RespecArch& arch, const RngSeed& init_seed);

  const RespecArch& arch() const { return arch_; }

  // y [batch, K] normalized inputs -> out [batch, L], entries in (0,1).
  // Dropout fires only in train mode and draws its masks from `dropout_rng`.
  void forward(const double* y, double* out, std::size_t batch, bool train,
               Rng* dropout_rng = nullptr);

  // Single normalized signal to a spectrum (eval mode).
  Spectrum reconstruct_normalized(const EncodedSignal& y_norm,
                                  const WavelengthGrid& grid);

  // dloss_dout [batch, L]; accumulates parameter gradients. Requires a
  // train-mode forward on the same batch first.
  void backward(const double* dloss_dout, std::size_t batch);

  void zero_grad();

  // Deterministic (name, tensor) order shared by the optimizer and the
  // checkpoint format.
  std::vector<std::pair<std::string, Tensor*>> named_params();

 private:
  RespecArch arch_;

  std::vector<Linear> rec_lin_;
  std::vector<Relu> rec_relu_;
  std::vector<Dropout> rec_drop_;
  std::vector<Conv1d> convs_;
  std::vector<MaxPool1d> pools_;
  std::vector<Relu> conv_relu_;
  std::vector<Linear> rf_lin_;
  std::vector<Relu> rf_relu_;
  std::vector<Dropout> rf_drop_;
  Sigmoid out_sig_;

  // batch-sized activations kept for the backward pass
  std::vector<std::vector<double>> rec_h_;
  std::vector<double> r_;
  std::vector<std::vector<double>> conv_y_;
  std::vector<std::vector<double>> pool_y_;
  std::vector<std::vector<double>> rf_h_;
  std::vector<double> rf_out_;
  std::vector<double> sum_;

  bool have_train_ctx_ = false;
  std::size_t ctx_batch_ = 0;

  std::vector<std::size_t> conv_lens() const;
};

// Deployment path: log-min-max the raw readout, then one eval-mode forward.
Spectrum reconstruct(RespecNet& net, const EncodedSignal& y_raw,
                     const WavelengthGrid& grid);

}  // namespace specrec::nn
