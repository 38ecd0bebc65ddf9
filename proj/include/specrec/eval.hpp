#pragma once

#include <cstddef>
#include <vector>

#include "specrec/types.hpp"

namespace specrec {

struct Peak {
  std::size_t index = 0;      // grid index of the local maximum
  double location_nm = 0.0;   // grid mapping of the index
  double intensity = 0.0;     // height at the maximum
  double prominence = 0.0;
};

enum class PositionUnits { Nm, Index };

// Strict local maxima with topographic prominence >= min_prominence, kept
// greedily in descending prominence subject to min_separation grid steps,
// returned sorted by location. Boundary samples count as one-sided maxima.
std::vector<Peak> detect_peaks(const Spectrum& x, double min_prominence = 0.05,
                               std::size_t min_separation = 5);

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (truth, recon)
  std::vector<std::size_t> unmatched_truth;
  std::vector<std::size_t> spurious_recon;
};

// Greedy nearest-location matching within a window of grid steps. Ties are
// broken toward lower indices so the pairing is reproducible.
Matching match_peaks(const std::vector<Peak>& truth, const std::vector<Peak>& recon,
                     double window = 10.0);

// (lambda_rec - lambda_truth) / lambda_truth, signed.
double relative_position_error(const Peak& truth, const Peak& recon,
                               PositionUnits units = PositionUnits::Nm);

// (I_rec - I_truth) / I_truth, signed; heights as given in the peaks.
double relative_intensity_error(const Peak& truth, const Peak& recon);

double rmse(const Spectrum& truth, const Spectrum& recon);

struct PeakError {
  double wavelength_nm = 0.0;       // truth location
  double rel_position_error = 0.0;
  double rel_intensity_error = 0.0; // heights renormalized to each global max
  bool matched = false;
  bool minor = false;               // not the most intense truth peak
};

struct MetricsReport {
  std::vector<PeakError> per_peak;
  double mae = 0.0;   // mean |rel position error| over matched peaks
  double rmse = 0.0;  // mean spectrum rmse over the dataset
  std::size_t n_unmatched_truth = 0;
  std::size_t n_spurious = 0;
};

struct EvalOptions {
  double min_prominence = 0.05;
  std::size_t min_separation = 5;
  double match_window = 10.0;
  PositionUnits units = PositionUnits::Nm;
};

// Dataset-level metrics: detect peaks on truth and reconstruction, match,
// and accumulate the error distributions. Intensity errors compare heights
// renormalized to each spectrum's most intense peak, mirroring how minor
// peaks are judged.
MetricsReport evaluate(const std::vector<Spectrum>& truth,
                       const std::vector<Spectrum>& recon,
                       const EvalOptions& opts = {});

}  // namespace specrec
