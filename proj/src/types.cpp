#include "specrec/types.hpp"

#include <algorithm>
#include <cmath>

#include "specrec/errors.hpp"

namespace specrec {

Spectrum::Spectrum(WavelengthGrid grid, std::vector<double> values) : grid_(grid) {
  if (values.size() != grid.count())
    throw DimensionMismatch("spectrum has " + std::to_string(values.size()) +
                            " values for a grid of " + std::to_string(grid.count()));
  for (double v : values) {
    if (!(v >= 0.0))
      throw InvalidArgument("spectrum entries must be non-negative finite numbers");
  }
  values_ = std::move(values);
}

Spectrum Spectrum::unchecked(WavelengthGrid grid, std::vector<double> values) {
  if (values.size() != grid.count())
    throw DimensionMismatch("spectrum has " + std::to_string(values.size()) +
                            " values for a grid of " + std::to_string(grid.count()));
  Spectrum s;
  s.grid_ = grid;
  s.values_ = std::move(values);
  return s;
}

ResponseMatrix::ResponseMatrix(std::size_t rows, std::size_t cols,
                               std::vector<double> entries, std::string source_id) {
  if (rows == 0 || cols == 0) throw InvalidArgument("response matrix must be non-empty");
  if (entries.size() != rows * cols)
    throw DimensionMismatch("response matrix entry count " + std::to_string(entries.size()) +
                            " != " + std::to_string(rows) + "x" + std::to_string(cols));
  for (double v : entries) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidArgument("response matrix entries must be non-negative finite numbers");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const double* r = entries.data() + i * cols;
    if (std::all_of(r, r + cols, [](double v) { return v == 0.0; }))
      throw InvalidArgument("response matrix row " + std::to_string(i) +
                            " is all zero (dead detector)");
  }
  rows_ = rows;
  cols_ = cols;
  entries_ = std::move(entries);
  source_id_ = std::move(source_id);
}

ResponseMatrix ResponseMatrix::unchecked(std::size_t rows, std::size_t cols,
                                         std::vector<double> entries,
                                         std::string source_id) {
  if (entries.size() != rows * cols)
    throw DimensionMismatch("response matrix entry count mismatch");
  ResponseMatrix r;
  r.rows_ = rows;
  r.cols_ = cols;
  r.entries_ = std::move(entries);
  r.source_id_ = std::move(source_id);
  return r;
}

EncodedSignal EncodedSignal::raw(std::vector<double> values) {
  EncodedSignal y;
  y.values_ = std::move(values);
  y.normalized_ = false;
  return y;
}

EncodedSignal EncodedSignal::normalized(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("normalized signal must be non-empty");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (std::abs(*lo) > 1e-12 || std::abs(*hi - 1.0) > 1e-12)
    throw InvalidArgument("normalized signal must have min 0 and max 1");
  EncodedSignal y;
  y.values_ = std::move(values);
  y.normalized_ = true;
  return y;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Simulated: return "simulated";
    case Provenance::Augmented: return "augmented";
    case Provenance::External: return "external";
  }
  return "external";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "simulated") return Provenance::Simulated;
  if (s == "augmented") return Provenance::Augmented;
  if (s == "external") return Provenance::External;
  throw InvalidArgument("unknown provenance '" + s + "'");
}

}  // namespace specrec
