#include "specrec/grid.hpp"

#include <string>

#include "specrec/errors.hpp"

namespace specrec {

WavelengthGrid::WavelengthGrid(double start_nm, double step_nm, std::size_t count)
    : start_(start_nm), step_(step_nm), count_(count) {
  if (!(step_nm > 0.0)) throw InvalidArgument("grid step must be > 0");
  if (count < 2) throw InvalidArgument("grid needs at least 2 samples, got " +
                                       std::to_string(count));
}

}  // namespace specrec
