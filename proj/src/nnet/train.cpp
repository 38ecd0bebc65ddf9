#include "specrec/nnet/train.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "specrec/encode.hpp"
#include "specrec/errors.hpp"
#include "specrec/nnet/adam.hpp"
#include "specrec/nnet/normalize.hpp"

namespace specrec::nn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw BadConfig("batch_size must be >= 1");
  if (iterations < 1) throw BadConfig("iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw BadConfig("learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw BadConfig("adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw BadConfig("adam_eps must be > 0");
}

std::string hda_config_fingerprint(const HdaConfig& cfg) {
  std::ostringstream os;
  os << "S=" << cfg.s_outer << ";T=" << cfg.t_inner << ";alpha=" << cfg.alpha
     << ";sigma_eps=" << cfg.sigma_eps << ";clamp=" << cfg.clamp_response
     << ";rel=" << cfg.sigma_relative;
  std::ostringstream hex;
  hex << std::hex << fnv1a64(os.str());
  return hex.str();
}

TrainResult train(const ResponseMatrix& R, const SimConfig& sim_cfg,
                  const HdaConfig& hda_cfg, const RespecArch& arch,
                  const TrainConfig& cfg, const ModelCheckpoint* resume,
                  const ProgressFn& progress) {
  cfg.validate();
  sim_cfg.validate();
  hda_cfg.validate();
  arch.validate();
  if (R.rows() != arch.input_dim || R.cols() != arch.output_dim)
    throw DimensionMismatch("train: R is " + std::to_string(R.rows()) + "x" +
                            std::to_string(R.cols()) + " but the arch expects " +
                            std::to_string(arch.input_dim) + "x" +
                            std::to_string(arch.output_dim));
  if (sim_cfg.grid.count() != R.cols())
    throw DimensionMismatch("train: simulation grid does not match R");

  RespecNet net = resume ? restore_net(*resume)
                         : RespecNet(arch, cfg.seed.child("model"));
  if (resume && !(resume->arch == arch))
    throw BadConfig("resume checkpoint architecture differs from the requested one");
  auto params = net.named_params();
  Adam adam(AdamConfig{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                       cfg.adam_eps},
            params);
  if (resume) adam.restore(resume->adam_step, resume->adam_m, resume->adam_v);

  const std::size_t base_iter = resume ? resume->meta.iterations : 0;
  const std::size_t k = arch.input_dim;
  const std::size_t l = arch.output_dim;
  // batch_size counts simulated spectra; augmentation multiplies the rows
  const std::size_t rows =
      cfg.batch_size * (cfg.use_hda ? hda_cfg.pairs_per_spectrum() : 1);

  std::vector<double> targets(rows * l), inputs(rows * k), preds(rows * l),
      dpred(rows * l);
  std::vector<double> loss_history;
  loss_history.reserve(cfg.iterations);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const RngSeed iter_seed = cfg.seed.child("iter", base_iter + it);

    std::size_t row = 0;
    if (cfg.use_hda) {
      for (std::size_t si = 0; si < cfg.batch_size; ++si) {
        const Spectrum x =
            simulate_spectrum(sim_cfg, iter_seed.child("spec", si)).first;
        const auto pairs = augment(x, R, hda_cfg, iter_seed.child("aug", si));
        for (const auto& [pair, rec] : pairs) {
          std::memcpy(targets.data() + row * l, pair.x.values().data(),
                      l * sizeof(double));
          std::memcpy(inputs.data() + row * k, pair.y.values().data(),
                      k * sizeof(double));
          ++row;
        }
      }
    } else {
      std::vector<double> y(k);
      for (; row < rows; ++row) {
        const Spectrum x =
            simulate_spectrum(sim_cfg, iter_seed.child("spec", row)).first;
        encode_into(R, x.values().data(), y.data());
        std::memcpy(targets.data() + row * l, x.values().data(), l * sizeof(double));
        std::memcpy(inputs.data() + row * k, y.data(), k * sizeof(double));
      }
    }

    for (std::size_t i = 0; i < rows; ++i) log_min_max_row(inputs.data() + i * k, k);

    Rng drop_rng(iter_seed.child("dropout"));
    net.forward(inputs.data(), preds.data(), rows, true, &drop_rng);

    double loss = 0.0;
    const double inv = 1.0 / static_cast<double>(rows * l);
    for (std::size_t i = 0; i < rows * l; ++i) {
      const double d = preds[i] - targets[i];
      loss += d * d;
      dpred[i] = 2.0 * d * inv;
    }
    loss *= inv;

    net.zero_grad();
    net.backward(dpred.data(), rows);
    adam.step(params);

    loss_history.push_back(loss);
    if (progress) progress(base_iter + it, loss);
  }

  TrainMeta meta;
  meta.iterations = base_iter + cfg.iterations;
  const std::size_t tail = std::min<std::size_t>(500, loss_history.size());
  meta.loss_history_tail.assign(loss_history.end() - static_cast<std::ptrdiff_t>(tail),
                                loss_history.end());
  meta.seed = cfg.seed;
  meta.hda_config_hash = hda_config_fingerprint(hda_cfg);
  meta.hda_enabled = cfg.use_hda;

  return TrainResult{snapshot(net, adam, std::move(meta)), std::move(loss_history)};
}

}  // namespace specrec::nn
