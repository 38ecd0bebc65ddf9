#include "specrec/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "specrec/encode.hpp"
#include "specrec/errors.hpp"
#include "specrec/parallel.hpp"

namespace specrec {

void SimConfig::validate() const {
  if (m_peaks_min < 1 || m_peaks_max < m_peaks_min)
    throw BadConfig("peak count range must satisfy 1 <= min <= max");
  for (const auto& [name, r] :
       {std::pair<const char*, Range>{"mu", mu_range},
        {"gamma", gamma_range},
        {"intensity", intensity_range}}) {
    if (!(r.lo <= r.hi)) throw BadConfig(std::string(name) + " range is empty");
  }
  if (!(gamma_range.lo > 0.0)) throw BadConfig("gamma must be > 0");
  if (!(intensity_range.lo > 0.0)) throw BadConfig("intensity must be > 0");
}

SimConfig SimConfig::for_grid(const WavelengthGrid& grid) {
  SimConfig cfg;
  cfg.grid = grid;
  cfg.mu_range = Range{0.0, static_cast<double>(grid.count() - 1)};
  return cfg;
}

std::vector<double> lorentzian(const PeakParams& p, const WavelengthGrid& grid) {
  if (!(p.gamma > 0.0)) throw InvalidArgument("lorentzian gamma must be > 0");
  if (!(p.intensity > 0.0)) throw InvalidArgument("lorentzian intensity must be > 0");
  const double g2 = p.gamma * p.gamma;
  std::vector<double> v(grid.count());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double d = static_cast<double>(j) - p.mu;
    v[j] = p.intensity * g2 / (d * d + g2);
  }
  return v;
}

std::pair<Spectrum, std::vector<PeakParams>> simulate_spectrum(const SimConfig& cfg,
                                                               const RngSeed& seed) {
  cfg.validate();
  Rng rng(seed);

  std::size_t m = cfg.m_peaks_min;
  if (cfg.m_peaks_max > cfg.m_peaks_min)
    m += rng.uniform_index(cfg.m_peaks_max - cfg.m_peaks_min + 1);

  std::vector<PeakParams> peaks(m);
  for (auto& p : peaks) {
    p.mu = rng.uniform(cfg.mu_range.lo, cfg.mu_range.hi);
    p.gamma = rng.uniform(cfg.gamma_range.lo, cfg.gamma_range.hi);
    p.intensity = rng.uniform(cfg.intensity_range.lo, cfg.intensity_range.hi);
  }

  std::vector<double> sum(cfg.grid.count(), 0.0);
  for (const auto& p : peaks) {
    const auto v = lorentzian(p, cfg.grid);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += v[j];
  }

  const double peak = *std::max_element(sum.begin(), sum.end());
  if (peak < 1e-12) throw DegenerateSpectrum("pre-normalization maximum below 1e-12");
  for (auto& v : sum) v /= peak;

  return {Spectrum(cfg.grid, std::move(sum)), std::move(peaks)};
}

LabeledPair simulate_pair(const SimConfig& cfg, const ResponseMatrix& R,
                          const RngSeed& seed) {
  if (R.cols() != cfg.grid.count())
    throw DimensionMismatch("simulate_pair: R has " + std::to_string(R.cols()) +
                            " columns but grid has " + std::to_string(cfg.grid.count()));
  auto [x, peaks] = simulate_spectrum(cfg, seed);
  EncodedSignal y = encode(R, x);
  return LabeledPair{std::move(x), std::move(y), Provenance::Simulated, -1, -1, {seed}};
}

std::vector<LabeledPair> generate_dataset(const SimConfig& cfg, const ResponseMatrix& R,
                                          std::size_t n, const RngSeed& seed,
                                          std::size_t threads) {
  if (n < 1) throw BadConfig("dataset size must be >= 1");
  std::vector<std::optional<LabeledPair>> slots(n);
  parallel_for(n, threads, [&](std::size_t i) {
    slots[i] = simulate_pair(cfg, R, seed.child("pair", i));
  });
  std::vector<LabeledPair> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ResponseMatrix make_device_response(std::size_t k, const WavelengthGrid& grid,
                                    const RngSeed& seed, double row_scale) {
  if (k == 0) throw InvalidArgument("response matrix needs at least one detector");
  if (!(row_scale > 0.0)) throw InvalidArgument("row_scale must be > 0");
  const std::size_t l = grid.count();
  std::vector<double> entries(k * l);
  for (std::size_t i = 0; i < k; ++i) {
    Rng rng(seed.child("detector", i));
    const std::size_t lobes = 3 + rng.uniform_index(3);
    const double baseline = rng.uniform(0.003, 0.015);
    double* row = entries.data() + i * l;
    std::fill(row, row + l, baseline);
    for (std::size_t b = 0; b < lobes; ++b) {
      const double mu = rng.uniform(0.0, static_cast<double>(l - 1));
      // lobe widths scale with the grid so detectors stay distinguishable
      const double width =
          rng.uniform(0.06, 0.25) * static_cast<double>(l - 1);
      const double amp = rng.uniform(0.3, 1.0);
      for (std::size_t j = 0; j < l; ++j) {
        const double d = (static_cast<double>(j) - mu) / width;
        row[j] += amp * std::exp(-0.5 * d * d);
      }
    }
    const double peak = *std::max_element(row, row + l);
    for (std::size_t j = 0; j < l; ++j) row[j] *= row_scale / peak;
  }
  return ResponseMatrix(k, l, std::move(entries),
                        "synthetic:" + std::to_string(seed.seed));
}

}  // namespace specrec
