#pragma once

#include <cstddef>
#include <functional>

#include "specrec/hda.hpp"
#include "specrec/nnet/checkpoint.hpp"
#include "specrec/nnet/model.hpp"
#include "specrec/simgen.hpp"
#include "specrec/types.hpp"

namespace specrec::nn {

struct TrainConfig {
  std::size_t batch_size = 256;  // simulated spectra per iteration
  double learning_rate = 3e-4;
  std::size_t iterations = 20000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  RngSeed seed{0, "train"};
  bool use_hda = true;  // off reproduces the unaugmented ablation

  void validate() const;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<double> loss_history;
};

using ProgressFn = std::function<void(std::size_t iteration, double loss)>;

// Infinite-data regime: every iteration draws batch_size fresh simulated
// spectra, expands each to S*T pairs through the augmentation (or encodes
// them directly with HDA off), log-min-max normalizes the readouts, and
// takes one Adam step on the MSE against the clean spectra. Deterministic
// given the seed; resuming continues the step counter.
TrainResult train(const ResponseMatrix& R, const SimConfig& sim_cfg,
                  const HdaConfig& hda_cfg, const RespecArch& arch,
                  const TrainConfig& cfg, const ModelCheckpoint* resume = nullptr,
                  const ProgressFn& progress = {});

// Stable fingerprint of the augmentation recipe, recorded in checkpoints.
std::string hda_config_fingerprint(const HdaConfig& cfg);

}  // namespace specrec::nn
