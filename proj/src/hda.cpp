#include "specrec/hda.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "specrec/encode.hpp"
#include "specrec/errors.hpp"

namespace specrec {

void HdaConfig::validate() const {
  if (s_outer < 1 || t_inner < 1) throw BadConfig("S and T must be >= 1");
  if (!(alpha >= 0.0)) throw BadConfig("alpha must be >= 0");
  if (!(sigma_eps >= 0.0)) throw BadConfig("sigma_eps must be >= 0");
}

ResponseMatrix perturb_response(const ResponseMatrix& R, double alpha,
                                const RngSeed& seed, bool clamp) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  std::vector<double> entries = R.entries();
  if (alpha > 0.0) {
    Rng rng(seed);
    for (auto& v : entries) {
      // sigma_ij = alpha * R_ij; zero entries carry zero noise
      v += alpha * v * rng.gaussian();
      if (clamp && v < 0.0) v = 0.0;
    }
  }
  return ResponseMatrix::unchecked(R.rows(), R.cols(), std::move(entries),
                                   R.source_id() + "+delta");
}

EncodedSignal perturb_signal(const EncodedSignal& y, double sigma_eps,
                             const RngSeed& seed, bool sigma_relative) {
  if (y.is_normalized())
    throw NormalizedInput("perturb_signal requires a raw readout; augmentation "
                          "precedes normalization");
  if (!(sigma_eps >= 0.0)) throw InvalidArgument("sigma_eps must be >= 0");
  std::vector<double> values = y.values();
  double sigma = sigma_eps;
  if (sigma_relative && !values.empty()) {
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    sigma *= mean;
  }
  if (sigma > 0.0) {
    Rng rng(seed);
    for (auto& v : values) v += std::max(0.0, sigma * rng.gaussian());
  }
  return EncodedSignal::raw(std::move(values));
}

std::vector<std::pair<LabeledPair, PerturbationRecord>> augment(
    const Spectrum& x, const ResponseMatrix& R, const HdaConfig& cfg,
    const RngSeed& seed) {
  cfg.validate();
  if (R.cols() != x.size())
    throw DimensionMismatch("augment: R has " + std::to_string(R.cols()) +
                            " columns but spectrum has " + std::to_string(x.size()));

  std::vector<std::pair<LabeledPair, PerturbationRecord>> out;
  out.reserve(cfg.pairs_per_spectrum());

  for (std::size_t s = 0; s < cfg.s_outer; ++s) {
    const RngSeed delta_seed = seed.child("delta", s);
    const ResponseMatrix rs = perturb_response(R, cfg.alpha, delta_seed,
                                               cfg.clamp_response);
    EncodedSignal ys = encode(rs, x);
    // A negative-perturbed R can push a readout slightly below zero;
    // physical readouts are floored so the log transform stays defined.
    {
      std::vector<double> v = ys.values();
      for (auto& e : v) e = std::max(0.0, e);
      ys = EncodedSignal::raw(std::move(v));
    }

    for (std::size_t t = 0; t < cfg.t_inner; ++t) {
      const RngSeed eps_seed = seed.child("eps", s * cfg.t_inner + t);
      EncodedSignal yst = perturb_signal(ys, cfg.sigma_eps, eps_seed,
                                         cfg.sigma_relative);
      LabeledPair pair{x, std::move(yst), Provenance::Augmented,
                       static_cast<int>(s), static_cast<int>(t),
                       {delta_seed, eps_seed}};
      out.emplace_back(std::move(pair),
                       PerturbationRecord{static_cast<int>(s), static_cast<int>(t),
                                          delta_seed, eps_seed});
    }
  }
  return out;
}

}  // namespace specrec
