#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "specrec/nnet/adam.hpp"
#include "specrec/nnet/model.hpp"
#include "specrec/nnet/tensor.hpp"
#include "specrec/rng.hpp"

namespace specrec::nn {

struct TrainMeta {
  std::uint64_t iterations = 0;
  std::vector<double> loss_history_tail;
  RngSeed seed;
  std::string hda_config_hash;
  bool hda_enabled = true;
};

// Everything needed to resume training or run inference: architecture,
// parameters, optimizer moments, and the training fingerprint.
struct ModelCheckpoint {
  RespecArch arch;
  std::vector<std::pair<std::string, Tensor>> params;
  std::uint64_t adam_step = 0;
  std::vector<std::vector<double>> adam_m;
  std::vector<std::vector<double>> adam_v;
  TrainMeta meta;
};

ModelCheckpoint snapshot(RespecNet& net, const Adam& adam, TrainMeta meta);

// Fresh network with the checkpoint's parameters; forward outputs are
// bit-identical to the snapshotted network.
RespecNet restore_net(const ModelCheckpoint& ckpt);

// Binary, little-endian: magic "RSPN", u32 version, length-prefixed arch
// JSON, named f64 arrays (u32 name length, name, u32 dim count, u64 dims,
// data), optimizer state in the same array layout, then meta JSON.
void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace specrec::nn
