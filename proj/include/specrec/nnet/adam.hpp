#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "specrec/nnet/tensor.hpp"

namespace specrec::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. First and second moment
// estimates are kept per parameter in list order.
class Adam {
 public:
  Adam(const AdamConfig& cfg, const std::vector<std::pair<std::string, Tensor*>>& params);

  // One update from the gradients currently stored in the tensors.
  void step(const std::vector<std::pair<std::string, Tensor*>>& params);

  std::uint64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  // checkpoint access
  const std::vector<std::vector<double>>& m() const { return m_; }
  const std::vector<std::vector<double>>& v() const { return v_; }
  void restore(std::uint64_t t, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace specrec::nn
