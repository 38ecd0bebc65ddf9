#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specrec/grid.hpp"
#include "specrec/rng.hpp"

namespace specrec {

// Non-negative intensity vector on a wavelength grid. Immutable after
// construction; simulated spectra additionally have max == 1.
class Spectrum {
 public:
  Spectrum(WavelengthGrid grid, std::vector<double> values);

  // Solver outputs (plain least squares, pseudoinverse features) may carry
  // negative entries; they bypass the non-negativity check on purpose.
  static Spectrum unchecked(WavelengthGrid grid, std::vector<double> values);

  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  Spectrum() : grid_(WavelengthGrid::device_default()) {}
  WavelengthGrid grid_;
  std::vector<double> values_;
};

// K x L encoder responsivity matrix, row-major. Entries are relative
// spectral power densities; a row of zeros means a dead detector and is
// rejected at construction.
class ResponseMatrix {
 public:
  ResponseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries,
                 std::string source_id);

  // Perturbed copies from the augmentation path may dip below zero; that is
  // a modelling choice, not a device state, so it skips the sign check.
  static ResponseMatrix unchecked(std::size_t rows, std::size_t cols,
                                  std::vector<double> entries, std::string source_id);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  const std::vector<double>& entries() const { return entries_; }
  const double* row(std::size_t i) const { return entries_.data() + i * cols_; }
  const std::string& source_id() const { return source_id_; }

 private:
  ResponseMatrix() = default;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
  std::string source_id_;
};

// K detector readouts. Raw readouts live in device units; `normalized`
// marks the [0,1] log-min-max form the network consumes.
class EncodedSignal {
 public:
  static EncodedSignal raw(std::vector<double> values);
  // Checks min == 0 and max == 1 within 1e-12.
  static EncodedSignal normalized(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool is_normalized() const { return normalized_; }

 private:
  EncodedSignal() = default;
  std::vector<double> values_;
  bool normalized_ = false;
};

enum class Provenance { Simulated, Augmented, External };

// One (x, y) training/evaluation pair. seed_trace holds every stream seed
// that produced it, so the pair can be regenerated byte for byte.
struct LabeledPair {
  Spectrum x;
  EncodedSignal y;
  Provenance provenance = Provenance::External;
  // valid when provenance == Augmented
  int s_index = -1;
  int t_index = -1;
  std::vector<RngSeed> seed_trace;
};

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

}  // namespace specrec
