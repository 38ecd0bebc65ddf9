#pragma once

#include <cstddef>

namespace specrec {

// Equally spaced wavelength axis. The simulation itself works in grid-index
// units; the nm mapping is attached for reporting (value(j) = start + j*step).
class WavelengthGrid {
 public:
  WavelengthGrid(double start_nm, double step_nm, std::size_t count);

  double start() const { return start_; }
  double step() const { return step_; }
  std::size_t count() const { return count_; }

  double value(std::size_t j) const { return start_ + static_cast<double>(j) * step_; }

  // 16-detector device axis: indices 0..205 mapped to 400..605 nm.
  static WavelengthGrid device_default() { return WavelengthGrid(400.0, 1.0, 206); }

  bool operator==(const WavelengthGrid&) const = default;

 private:
  double start_;
  double step_;
  std::size_t count_;
};

}  // namespace specrec
