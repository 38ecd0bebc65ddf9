#include "specrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specrec/errors.hpp"

namespace specrec {

namespace {

// topographic prominence: on each side, the lowest point between the peak
// and the next strictly higher sample (or the signal edge); the base is the
// higher of the two minima. A side with no samples (boundary peak) does not
// constrain the base.
double prominence_at(const std::vector<double>& v, std::size_t j) {
  const double h = v[j];
  double left_min = h;
  bool left_any = false;
  for (std::size_t i = j; i-- > 0;) {
    if (v[i] > h) break;
    left_min = std::min(left_min, v[i]);
    left_any = true;
  }
  double right_min = h;
  bool right_any = false;
  for (std::size_t i = j + 1; i < v.size(); ++i) {
    if (v[i] > h) break;
    right_min = std::min(right_min, v[i]);
    right_any = true;
  }
  double base;
  if (left_any && right_any) base = std::max(left_min, right_min);
  else if (left_any) base = left_min;
  else if (right_any) base = right_min;
  else base = h;
  return h - base;
}

}  // namespace

std::vector<Peak> detect_peaks(const Spectrum& x, double min_prominence,
                               std::size_t min_separation) {
  const auto& v = x.values();
  const std::size_t n = v.size();

  std::vector<Peak> candidates;
  for (std::size_t j = 0; j < n; ++j) {
    const bool left_ok = (j == 0) || v[j] > v[j - 1];
    const bool right_ok = (j + 1 == n) || v[j] > v[j + 1];
    if (!(left_ok && right_ok)) continue;
    const double prom = prominence_at(v, j);
    if (prom < min_prominence) continue;
    candidates.push_back(Peak{j, x.grid().value(j), v[j], prom});
  }

  // keep by descending prominence, lowest index on ties
  std::sort(candidates.begin(), candidates.end(), [](const Peak& a, const Peak& b) {
    if (a.prominence != b.prominence) return a.prominence > b.prominence;
    return a.index < b.index;
  });
  std::vector<Peak> kept;
  for (const auto& c : candidates) {
    bool clear = true;
    for (const auto& k : kept) {
      const std::size_t d = c.index > k.index ? c.index - k.index : k.index - c.index;
      if (d < min_separation) {
        clear = false;
        break;
      }
    }
    if (clear) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Peak& a, const Peak& b) { return a.index < b.index; });
  return kept;
}

Matching match_peaks(const std::vector<Peak>& truth, const std::vector<Peak>& recon,
                     double window) {
  Matching m;
  std::vector<bool> truth_used(truth.size(), false);
  std::vector<bool> recon_used(recon.size(), false);

  // repeatedly take the globally closest unused pair inside the window
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bt = 0, br = 0;
    bool found = false;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (truth_used[t]) continue;
      for (std::size_t r = 0; r < recon.size(); ++r) {
        if (recon_used[r]) continue;
        const double d = std::abs(static_cast<double>(truth[t].index) -
                                  static_cast<double>(recon[r].index));
        if (d <= window && d < best) {
          best = d;
          bt = t;
          br = r;
          found = true;
        }
      }
    }
    if (!found) break;
    truth_used[bt] = true;
    recon_used[br] = true;
    m.pairs.emplace_back(bt, br);
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (!truth_used[t]) m.unmatched_truth.push_back(t);
  for (std::size_t r = 0; r < recon.size(); ++r)
    if (!recon_used[r]) m.spurious_recon.push_back(r);
  return m;
}

double relative_position_error(const Peak& truth, const Peak& recon,
                               PositionUnits units) {
  const double lt = units == PositionUnits::Nm ? truth.location_nm
                                               : static_cast<double>(truth.index);
  const double lr = units == PositionUnits::Nm ? recon.location_nm
                                               : static_cast<double>(recon.index);
  if (lt == 0.0)
    throw ZeroWavelength("truth wavelength is zero; use the nm mapping");
  return (lr - lt) / lt;
}

double relative_intensity_error(const Peak& truth, const Peak& recon) {
  if (!(truth.intensity > 0.0))
    throw ZeroIntensity("truth peak intensity is zero");
  return (recon.intensity - truth.intensity) / truth.intensity;
}

double rmse(const Spectrum& truth, const Spectrum& recon) {
  if (!(truth.grid() == recon.grid()))
    throw DimensionMismatch("rmse requires spectra on the same grid");
  double s = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double d = truth[j] - recon[j];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(truth.size()));
}

MetricsReport evaluate(const std::vector<Spectrum>& truth,
                       const std::vector<Spectrum>& recon, const EvalOptions& opts) {
  if (truth.size() != recon.size())
    throw DimensionMismatch("evaluate: " + std::to_string(truth.size()) +
                            " truth vs " + std::to_string(recon.size()) +
                            " reconstructed spectra");
  MetricsReport report;
  double mae_sum = 0.0;
  std::size_t mae_n = 0;
  double rmse_sum = 0.0;

  for (std::size_t s = 0; s < truth.size(); ++s) {
    rmse_sum += rmse(truth[s], recon[s]);

    const auto tp = detect_peaks(truth[s], opts.min_prominence, opts.min_separation);
    const auto rp = detect_peaks(recon[s], opts.min_prominence, opts.min_separation);
    const auto matching = match_peaks(tp, rp, opts.match_window);

    // renormalize heights to each side's most intense peak
    double t_top = 0.0, r_top = 0.0;
    std::size_t t_top_idx = 0;
    for (std::size_t i = 0; i < tp.size(); ++i)
      if (tp[i].intensity > t_top) {
        t_top = tp[i].intensity;
        t_top_idx = i;
      }
    for (const auto& p : rp) r_top = std::max(r_top, p.intensity);

    for (const auto& [t, r] : matching.pairs) {
      PeakError e;
      e.wavelength_nm = tp[t].location_nm;
      e.matched = true;
      e.minor = tp.size() > 1 && t != t_top_idx;
      e.rel_position_error = relative_position_error(tp[t], rp[r], opts.units);
      Peak tn = tp[t], rn = rp[r];
      if (t_top > 0.0) tn.intensity /= t_top;
      if (r_top > 0.0) rn.intensity /= r_top;
      e.rel_intensity_error = relative_intensity_error(tn, rn);
      mae_sum += std::abs(e.rel_position_error);
      ++mae_n;
      report.per_peak.push_back(e);
    }
    for (const std::size_t t : matching.unmatched_truth) {
      PeakError e;
      e.wavelength_nm = tp[t].location_nm;
      e.matched = false;
      e.minor = tp.size() > 1 && t != t_top_idx;
      e.rel_position_error = std::numeric_limits<double>::quiet_NaN();
      e.rel_intensity_error = std::numeric_limits<double>::quiet_NaN();
      report.per_peak.push_back(e);
      ++report.n_unmatched_truth;
    }
    report.n_spurious += matching.spurious_recon.size();
  }

  report.mae = mae_n > 0 ? mae_sum / static_cast<double>(mae_n) : 0.0;
  report.rmse = truth.empty() ? 0.0 : rmse_sum / static_cast<double>(truth.size());
  return report;
}

}  // namespace specrec
