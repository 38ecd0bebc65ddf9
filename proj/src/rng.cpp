#include "specrec/rng.hpp"

#include <cmath>
#include <numbers>

#include "specrec/errors.hpp"

namespace specrec {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngSeed RngSeed::child(std::string_view label, std::uint64_t index) const {
  RngSeed out;
  out.seed = mix64(seed ^ fnv1a64(label) ^ (index * kGolden + 1));
  out.stream_label = stream_label + "/" + std::string(label) + "#" + std::to_string(index);
  return out;
}

Rng::Rng(const RngSeed& s) : state_(mix64(s.seed ^ fnv1a64(s.stream_label))) {}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_open_unit() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: n must be > 0");
  // rejection sampling to avoid modulo bias
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double Rng::gaussian() {
  // Box-Muller, cosine branch only: a fixed two-uniform footprint keeps
  // derived streams countable.
  const double u1 = next_open_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> gaussian_stream(const RngSeed& seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.gaussian();
  return out;
}

}  // namespace specrec
