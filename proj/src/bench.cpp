#include "specrec/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>
#include <vector>

#include "specrec/errors.hpp"

namespace specrec {

BenchResult benchmark(const std::function<void(std::size_t)>& run_sample,
                      std::size_t n_samples, std::size_t repeats,
                      std::size_t warmup) {
  if (repeats < 3) throw BadConfig("benchmark needs at least 3 repeats");
  if (n_samples < 1) throw BadConfig("benchmark needs at least 1 sample");

  using Clock = std::chrono::steady_clock;
  for (std::size_t w = 0; w < warmup; ++w)
    for (std::size_t i = 0; i < n_samples; ++i) run_sample(i);

  std::vector<double> per_sample_ms(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < n_samples; ++i) run_sample(i);
    const auto t1 = Clock::now();
    per_sample_ms[r] = std::chrono::duration<double, std::milli>(t1 - t0).count() /
                       static_cast<double>(n_samples);
  }

  double mean = 0.0;
  for (double v : per_sample_ms) mean += v;
  mean /= static_cast<double>(repeats);
  double var = 0.0;
  for (double v : per_sample_ms) var += (v - mean) * (v - mean);
  var /= static_cast<double>(repeats - 1);

  return BenchResult{mean, std::sqrt(var), n_samples, repeats, hardware_descriptor()};
}

std::string hardware_descriptor() {
  std::string model = "unknown cpu";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        model = line.substr(colon + 1);
        if (!model.empty() && model.front() == ' ') model.erase(0, 1);
      }
      break;
    }
  }
  return model + " / " + std::to_string(std::thread::hardware_concurrency()) +
         " threads";
}

}  // namespace specrec
