#include "specrec/nnet/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "specrec/errors.hpp"

namespace specrec::nn {

void log_min_max_row(double* row, std::size_t k, bool clamp) {
  if (k == 0) throw InvalidArgument("log_min_max on an empty signal");
  const double top = *std::max_element(row, row + k);
  if (!(top > 0.0)) throw NonPositive("signal maximum is not positive");
  if (clamp) {
    const double floor_v = 1e-12 * top;
    for (std::size_t i = 0; i < k; ++i) row[i] = std::max(row[i], floor_v);
  } else {
    for (std::size_t i = 0; i < k; ++i)
      if (!(row[i] > 0.0)) throw NonPositive("signal has non-positive entries");
  }
  double zmin = std::log(row[0]), zmax = zmin;
  for (std::size_t i = 0; i < k; ++i) {
    row[i] = std::log(row[i]);
    zmin = std::min(zmin, row[i]);
    zmax = std::max(zmax, row[i]);
  }
  const double span = zmax - zmin;
  if (span < 1e-12)
    throw ConstantSignal("log-range below 1e-12; normalization undefined");
  for (std::size_t i = 0; i < k; ++i) row[i] = (row[i] - zmin) / span;
}

EncodedSignal log_min_max(const EncodedSignal& y, bool clamp) {
  std::vector<double> v = y.values();
  log_min_max_row(v.data(), v.size(), clamp);
  return EncodedSignal::normalized(std::move(v));
}

}  // namespace specrec::nn
