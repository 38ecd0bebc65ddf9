#include "specrec/nnet/model.hpp"

#include <cstring>
#include <string>

#include "specrec/errors.hpp"
#include "specrec/nnet/normalize.hpp"

namespace specrec::nn {

void RespecArch::validate() const {
  if (input_dim < 1 || output_dim < 2)
    throw BadConfig("arch needs input_dim >= 1 and output_dim >= 2");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0))
    throw BadConfig("dropout_p must be in [0, 1)");
  if (conv_channels.empty()) throw BadConfig("conv module needs at least one layer");
  if (conv_kernel % 2 == 0 || conv_kernel < 1)
    throw BadConfig("conv kernel must be odd");
  if (pool_width < 1) throw BadConfig("pool width must be >= 1");
  if (pooled_len() < 1)
    throw BadConfig("output_dim too small: pooling erases the signal");
}

std::size_t RespecArch::pooled_len() const {
  std::size_t len = output_dim;
  for (std::size_t s = 0; s < conv_channels.size(); ++s)
    len = MaxPool1d::out_len(len, pool_width);
  return len;
}

std::vector<std::size_t> RespecNet::conv_lens() const {
  // length entering each conv stage
  std::vector<std::size_t> lens{arch_.output_dim};
  for (std::size_t s = 0; s + 1 < arch_.conv_channels.size(); ++s)
    lens.push_back(MaxPool1d::out_len(lens.back(), arch_.pool_width));
  return lens;
}

RespecNet::RespecNet(const RespecArch& arch, const RngSeed& init_seed) : arch_(arch) {
  arch_.validate();
  Rng rng(init_seed.child("init"));

  const std::size_t n_rec = arch_.rec_fc_dims.size();
  rec_lin_.resize(n_rec + 1);
  rec_relu_.resize(n_rec);
  rec_drop_.resize(n_rec);
  std::size_t prev = arch_.input_dim;
  for (std::size_t i = 0; i < n_rec; ++i) {
    rec_lin_[i].init(prev, arch_.rec_fc_dims[i], rng);
    rec_drop_[i].p = arch_.dropout_p;
    prev = arch_.rec_fc_dims[i];
  }
  rec_lin_[n_rec].init(prev, arch_.output_dim, rng);

  const std::size_t n_conv = arch_.conv_channels.size();
  convs_.resize(n_conv);
  pools_.resize(n_conv);
  conv_relu_.resize(n_conv);
  std::size_t ch = 1;
  for (std::size_t s = 0; s < n_conv; ++s) {
    convs_[s].init(ch, arch_.conv_channels[s], arch_.conv_kernel, rng);
    pools_[s].width = arch_.pool_width;
    ch = arch_.conv_channels[s];
  }

  const std::size_t n_rf = arch_.rf_fc_dims.size();
  rf_lin_.resize(n_rf + 1);
  rf_relu_.resize(n_rf);
  rf_drop_.resize(n_rf);
  prev = arch_.flattened_dim();
  for (std::size_t i = 0; i < n_rf; ++i) {
    rf_lin_[i].init(prev, arch_.rf_fc_dims[i], rng);
    rf_drop_[i].p = arch_.dropout_p;
    prev = arch_.rf_fc_dims[i];
  }
  rf_lin_[n_rf].init(prev, arch_.output_dim, rng);

  rec_h_.resize(n_rec);
  conv_y_.resize(n_conv);
  pool_y_.resize(n_conv);
  rf_h_.resize(n_rf);
}

void RespecNet::forward(const double* y, double* out, std::size_t batch, bool train,
                        Rng* dropout_rng) {
  const std::size_t l = arch_.output_dim;
  const bool cache = train;

  // rec_fc: FC -> ReLU -> Dropout per hidden layer, final FC to width L
  const double* cur = y;
  for (std::size_t i = 0; i < rec_relu_.size(); ++i) {
    const std::size_t d = arch_.rec_fc_dims[i];
    rec_h_[i].resize(batch * d);
    rec_lin_[i].forward(cur, rec_h_[i].data(), batch, cache);
    rec_relu_[i].forward(rec_h_[i].data(), rec_h_[i].data(), batch * d, cache);
    rec_drop_[i].forward(rec_h_[i].data(), rec_h_[i].data(), batch * d, train,
                         dropout_rng);
    cur = rec_h_[i].data();
  }
  r_.resize(batch * l);
  rec_lin_.back().forward(cur, r_.data(), batch, cache);

  // conv module over the coarse reconstruction, one channel in
  const auto lens = conv_lens();
  cur = r_.data();
  for (std::size_t s = 0; s < convs_.size(); ++s) {
    const std::size_t len = lens[s];
    const std::size_t ch = arch_.conv_channels[s];
    const std::size_t lo = MaxPool1d::out_len(len, arch_.pool_width);
    conv_y_[s].resize(batch * ch * len);
    convs_[s].forward(cur, conv_y_[s].data(), batch, len, cache);
    pool_y_[s].resize(batch * ch * lo);
    pools_[s].forward(conv_y_[s].data(), pool_y_[s].data(), batch, ch, len, true);
    conv_relu_[s].forward(pool_y_[s].data(), pool_y_[s].data(), batch * ch * lo,
                          cache);
    cur = pool_y_[s].data();
  }

  // rf_fc over the flattened features
  for (std::size_t i = 0; i < rf_relu_.size(); ++i) {
    const std::size_t d = arch_.rf_fc_dims[i];
    rf_h_[i].resize(batch * d);
    rf_lin_[i].forward(cur, rf_h_[i].data(), batch, cache);
    rf_relu_[i].forward(rf_h_[i].data(), rf_h_[i].data(), batch * d, cache);
    rf_drop_[i].forward(rf_h_[i].data(), rf_h_[i].data(), batch * d, train,
                        dropout_rng);
    cur = rf_h_[i].data();
  }
  rf_out_.resize(batch * l);
  rf_lin_.back().forward(cur, rf_out_.data(), batch, cache);

  // residual add, then one sigmoid
  sum_.resize(batch * l);
  for (std::size_t i = 0; i < batch * l; ++i) sum_[i] = r_[i] + rf_out_[i];
  out_sig_.forward(sum_.data(), out, batch * l, cache);

  have_train_ctx_ = train;
  ctx_batch_ = batch;
}

Spectrum RespecNet::reconstruct_normalized(const EncodedSignal& y_norm,
                                           const WavelengthGrid& grid) {
  if (!y_norm.is_normalized())
    throw InvalidArgument("reconstruct expects a normalized signal");
  if (y_norm.size() != arch_.input_dim)
    throw DimensionMismatch("signal has " + std::to_string(y_norm.size()) +
                            " entries but the model expects " +
                            std::to_string(arch_.input_dim));
  if (grid.count() != arch_.output_dim)
    throw DimensionMismatch("grid count does not match the model output width");
  std::vector<double> out(arch_.output_dim);
  forward(y_norm.values().data(), out.data(), 1, false, nullptr);
  return Spectrum(grid, std::move(out));
}

void RespecNet::backward(const double* dloss_dout, std::size_t batch) {
  if (!have_train_ctx_ || ctx_batch_ != batch)
    throw NoForwardContext("backward requires a train-mode forward on this batch");
  const std::size_t l = arch_.output_dim;
  const auto lens = conv_lens();

  // widest gradient slab any stage can produce
  std::size_t max_width = std::max({arch_.input_dim, arch_.output_dim,
                                    arch_.flattened_dim()});
  for (std::size_t d : arch_.rec_fc_dims) max_width = std::max(max_width, d);
  for (std::size_t d : arch_.rf_fc_dims) max_width = std::max(max_width, d);
  for (std::size_t s = 0; s < convs_.size(); ++s) {
    const std::size_t in_ch = (s == 0) ? 1 : arch_.conv_channels[s - 1];
    max_width = std::max(max_width, in_ch * lens[s]);
  }
  std::vector<double> grad_a(batch * max_width), grad_b(batch * max_width);

  std::vector<double> dsum(batch * l);
  out_sig_.backward(dloss_dout, dsum.data(), batch * l);

  // rf_fc backward down to the flattened features
  const std::size_t n_rf = rf_relu_.size();
  double* dpre = grad_a.data();
  rf_lin_.back().backward(dsum.data(), dpre, batch);
  for (std::size_t i = n_rf; i-- > 0;) {
    const std::size_t d = arch_.rf_fc_dims[i];
    rf_drop_[i].backward(dpre, dpre, batch * d);
    rf_relu_[i].backward(dpre, dpre, batch * d);
    double* dnext = (dpre == grad_a.data()) ? grad_b.data() : grad_a.data();
    rf_lin_[i].backward(dpre, dnext, batch);
    dpre = dnext;
  }
  // dpre now holds the gradient at the flattened conv output

  // conv module backward
  std::vector<double> dstage;
  for (std::size_t s = convs_.size(); s-- > 0;) {
    const std::size_t len = lens[s];
    const std::size_t ch = arch_.conv_channels[s];
    const std::size_t lo = MaxPool1d::out_len(len, arch_.pool_width);
    conv_relu_[s].backward(dpre, dpre, batch * ch * lo);
    dstage.resize(batch * ch * len);
    pools_[s].backward(dpre, dstage.data(), batch, ch, len);
    double* dnext = (dpre == grad_a.data()) ? grad_b.data() : grad_a.data();
    convs_[s].backward(dstage.data(), dnext, batch, len);
    dpre = dnext;
  }

  // residual: rec_fc output feeds both the conv path and the final add
  std::vector<double> dr(batch * l);
  for (std::size_t i = 0; i < batch * l; ++i) dr[i] = dsum[i] + dpre[i];

  const std::size_t n_rec = rec_relu_.size();
  double* drec = grad_a.data();
  rec_lin_.back().backward(dr.data(), drec, batch);
  for (std::size_t i = n_rec; i-- > 0;) {
    const std::size_t d = arch_.rec_fc_dims[i];
    rec_drop_[i].backward(drec, drec, batch * d);
    rec_relu_[i].backward(drec, drec, batch * d);
    double* dnext = (drec == grad_a.data()) ? grad_b.data() : grad_a.data();
    rec_lin_[i].backward(drec, dnext, batch);
    drec = dnext;
  }

  have_train_ctx_ = false;
}

void RespecNet::zero_grad() {
  for (auto& [name, t] : named_params()) t->zero_grad();
}

Spectrum reconstruct(RespecNet& net, const EncodedSignal& y_raw,
                     const WavelengthGrid& grid) {
  return net.reconstruct_normalized(log_min_max(y_raw), grid);
}

std::vector<std::pair<std::string, Tensor*>> RespecNet::named_params() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t i = 0; i < rec_lin_.size(); ++i) {
    out.emplace_back("rec_fc." + std::to_string(i) + ".weight", &rec_lin_[i].w);
    out.emplace_back("rec_fc." + std::to_string(i) + ".bias", &rec_lin_[i].b);
  }
  for (std::size_t s = 0; s < convs_.size(); ++s) {
    out.emplace_back("conv." + std::to_string(s) + ".weight", &convs_[s].w);
    out.emplace_back("conv." + std::to_string(s) + ".bias", &convs_[s].b);
  }
  for (std::size_t i = 0; i < rf_lin_.size(); ++i) {
    out.emplace_back("rf_fc." + std::to_string(i) + ".weight", &rf_lin_[i].w);
    out.emplace_back("rf_fc." + std::to_string(i) + ".bias", &rf_lin_[i].b);
  }
  return out;
}

}  // namespace specrec::nn
