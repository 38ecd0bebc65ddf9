#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace specrec {

struct BenchResult {
  double mean_ms = 0.0;  // per-sample wall time
  double std_ms = 0.0;   // across repeats
  std::size_t samples = 0;
  std::size_t repeats = 0;
  std::string hardware;
};

// Times `run_sample(i)` over the whole dataset, `repeats` times after
// `warmup` excluded passes; reports per-sample mean +- std across repeats.
// Single-threaded by contract: callers must not time under concurrent load.
BenchResult benchmark(const std::function<void(std::size_t)>& run_sample,
                      std::size_t n_samples, std::size_t repeats,
                      std::size_t warmup = 2);

std::string hardware_descriptor();

}  // namespace specrec
