#pragma once

#include <cstddef>

#include "specrec/types.hpp"

namespace specrec::nn {

// log-min-max: z = log(y), output = (z - min z)/(max z - min z), so the
// result is scale-invariant and lands exactly on [0, 1]. Entries are floored
// at 1e-12 * max(y) before the log (augmented readouts can contain exact
// zeros); pass clamp = false to reject non-positive entries instead.
EncodedSignal log_min_max(const EncodedSignal& y, bool clamp = true);

// In-place row variant for batch assembly; `row` holds k raw readouts.
void log_min_max_row(double* row, std::size_t k, bool clamp = true);

}  // namespace specrec::nn
