#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "specrec/types.hpp"

namespace specrec {

// One Lorentzian peak in grid-index units. `intensity` is the peak height
// before the spectrum-level normalization.
struct PeakParams {
  double mu = 0.0;
  double gamma = 1.0;
  double intensity = 1.0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Device-informed simulation recipe: M peaks with parameters drawn i.i.d.
// uniformly from the ranges below. Defaults match the 16-detector device.
struct SimConfig {
  std::size_t m_peaks_min = 3;
  std::size_t m_peaks_max = 3;  // == min for a fixed peak count
  Range mu_range{0.0, 205.0};
  Range gamma_range{15.0, 20.0};
  Range intensity_range{0.25, 1.0};
  WavelengthGrid grid = WavelengthGrid::device_default();

  void validate() const;

  // Defaults with the peak-location range matched to a custom grid.
  static SimConfig for_grid(const WavelengthGrid& grid);
};

// Peak-height form: v_j = I * gamma^2 / ((j - mu)^2 + gamma^2), evaluated
// at integer grid indices j = 0..L-1.
std::vector<double> lorentzian(const PeakParams& p, const WavelengthGrid& grid);

// Sum of M sampled peaks, divided by its maximum so max(values) == 1.
// Returns the spectrum together with the ground-truth peak parameters.
std::pair<Spectrum, std::vector<PeakParams>> simulate_spectrum(const SimConfig& cfg,
                                                               const RngSeed& seed);

LabeledPair simulate_pair(const SimConfig& cfg, const ResponseMatrix& R,
                          const RngSeed& seed);

// n independent pairs with per-sample derived seeds (order-independent,
// safe to regenerate any single index).
std::vector<LabeledPair> generate_dataset(const SimConfig& cfg, const ResponseMatrix& R,
                                          std::size_t n, const RngSeed& seed,
                                          std::size_t threads = 1);

// Smooth synthetic broadband responsivity matrix standing in for a measured
// device: every row is a positive mixture of wide Lorentzian lobes over a
// small baseline. row_scale sets the device output units; the default puts
// readouts where the stock readout-noise scale (sigma_eps = 1e-5) is a
// roughly one-percent effect, as on a real detector.
ResponseMatrix make_device_response(std::size_t k, const WavelengthGrid& grid,
                                    const RngSeed& seed, double row_scale = 1e-4);

}  // namespace specrec
