#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace specrec {

// Seed of a named random stream. Identical (seed, stream_label) pairs
// reproduce identical streams across runs and platforms; every stochastic
// operation in the library takes one of these explicitly. Child streams
// are derived by hashing, never by sharing generator state, so samples
// can be produced in any order (or in parallel) without changing results.
struct RngSeed {
  std::uint64_t seed = 0;
  std::string stream_label;

  // Derived stream for sub-task `label`, instance `index`.
  RngSeed child(std::string_view label, std::uint64_t index = 0) const;

  bool operator==(const RngSeed&) const = default;
};

// Counter-style generator: a splitmix64 walk seeded from the hashed
// (seed, label) pair. Integer state only; normal deviates come from
// Box-Muller so the stream layout is two uniforms per gaussian, always.
class Rng {
 public:
  explicit Rng(const RngSeed& s);

  std::uint64_t next_u64();

  // [0, 1)
  double next_unit();
  // (0, 1], safe as a log() argument
  double next_open_unit();

  double uniform(double lo, double hi);

  // Unbiased integer in [0, n); n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal deviate.
  double gaussian();

 private:
  std::uint64_t state_;
};

// n standard-normal draws from a fresh stream; deterministic in `seed`.
std::vector<double> gaussian_stream(const RngSeed& seed, std::size_t n);

// FNV-1a, used for stream labels and config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace specrec
