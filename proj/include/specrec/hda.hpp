#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "specrec/types.hpp"

namespace specrec {

enum class ResponseNoise { GaussianProportional };
enum class SignalNoise { ReluGaussian };

// Two-level augmentation: S perturbed response matrices, each encoding T
// noise-perturbed readouts, so one simulated spectrum yields S*T pairs.
struct HdaConfig {
  std::size_t s_outer = 2;
  std::size_t t_inner = 4;
  double alpha = 5e-2;      // response perturbation intensity
  double sigma_eps = 1e-5;  // readout noise scale
  ResponseNoise r_noise = ResponseNoise::GaussianProportional;
  SignalNoise y_noise = SignalNoise::ReluGaussian;
  // Optional variants; both off reproduces the baseline recipe.
  bool clamp_response = false;   // clip perturbed R entries at zero
  bool sigma_relative = false;   // scale sigma_eps by mean(y)

  std::size_t pairs_per_spectrum() const { return s_outer * t_inner; }
  void validate() const;
};

// Identifies one (s, t) cell of the augmentation lattice and the seeds
// that reproduce its delta_s and eps_t draws.
struct PerturbationRecord {
  int s_index = 0;
  int t_index = 0;
  RngSeed delta_seed;
  RngSeed eps_seed;
};

// R + Delta with Delta_ij ~ N(0, (alpha * R_ij)^2) i.i.d. Entries may go
// negative unless `clamp` is set; zero entries stay zero either way.
ResponseMatrix perturb_response(const ResponseMatrix& R, double alpha,
                                const RngSeed& seed, bool clamp = false);

// y + eps with eps_i = max(0, g_i), g_i ~ N(0, sigma^2) i.i.d., so the
// output dominates y elementwise. Rejects already-normalized signals.
EncodedSignal perturb_signal(const EncodedSignal& y, double sigma_eps,
                             const RngSeed& seed, bool sigma_relative = false);

// The full S x T lattice for one spectrum. Every pair keeps the unmodified
// x; ordering is s-major then t.
std::vector<std::pair<LabeledPair, PerturbationRecord>> augment(
    const Spectrum& x, const ResponseMatrix& R, const HdaConfig& cfg,
    const RngSeed& seed);

}  // namespace specrec
