#pragma once

#include "specrec/types.hpp"

namespace specrec {

// Noiseless forward model y = R x. Noise injection belongs to the
// augmentation stage, never here.
EncodedSignal encode(const ResponseMatrix& R, const Spectrum& x);

// Same product on a bare coefficient vector (solver iterates, perturbed
// signals); writes K values into `out`.
void encode_into(const ResponseMatrix& R, const double* x, double* out);

}  // namespace specrec
