#include "specrec/nnet/adam.hpp"

#include <cmath>

#include "specrec/errors.hpp"

namespace specrec::nn {

Adam::Adam(const AdamConfig& cfg,
           const std::vector<std::pair<std::string, Tensor*>>& params)
    : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& [name, t] : params) {
    m_.emplace_back(t->size(), 0.0);
    v_.emplace_back(t->size(), 0.0);
  }
}

void Adam::step(const std::vector<std::pair<std::string, Tensor*>>& params) {
  if (params.size() != m_.size())
    throw DimensionMismatch("optimizer state does not match the parameter list");
  ++t_;
  const double bias1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p].second;
    if (t.grad.size() != t.data.size())
      throw NoForwardContext("parameter '" + params[p].first + "' has no gradient");
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      const double g = t.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      t.data[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

void Adam::restore(std::uint64_t t, std::vector<std::vector<double>> m,
                   std::vector<std::vector<double>> v) {
  if (m.size() != m_.size() || v.size() != v_.size())
    throw DimensionMismatch("restored optimizer state has the wrong parameter count");
  for (std::size_t p = 0; p < m.size(); ++p)
    if (m[p].size() != m_[p].size() || v[p].size() != v_[p].size())
      throw DimensionMismatch("restored optimizer state has mismatched array sizes");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace specrec::nn
