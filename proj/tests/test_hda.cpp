#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "specrec/encode.hpp"
#include "specrec/errors.hpp"
#include "specrec/hda.hpp"
#include "specrec/simgen.hpp"

using namespace specrec;

namespace {

struct Fixture {
  WavelengthGrid grid{400.0, 1.0, 40};
  ResponseMatrix r = make_device_response(6, grid, RngSeed{3, "dev"});
  Spectrum x = [this] {
    SimConfig cfg = SimConfig::for_grid(grid);
    cfg.m_peaks_min = cfg.m_peaks_max = 2;
    return simulate_spectrum(cfg, RngSeed{4, "x"}).first;
  }();
};

}  // namespace

TEST_CASE("perturb_response zero alpha and zero entries") {
  Fixture f;
  const auto same = perturb_response(f.r, 0.0, RngSeed{1, "p"});
  CHECK(same.entries() == f.r.entries());

  // a zero entry stays zero: sigma_ij = alpha * R_ij = 0
  std::vector<double> e{0.0, 1.0, 2.0, 3.0};
  ResponseMatrix rz = ResponseMatrix::unchecked(2, 2, e, "z");
  const auto p = perturb_response(rz, 0.05, RngSeed{2, "p"});
  CHECK(p(0, 0) == 0.0);
  CHECK(p(0, 1) != 1.0);
}

TEST_CASE("perturb_response sample std matches alpha * R_ij") {
  // 1e4 draws of one entry with R_ij = 2, alpha = 0.05: std should be 0.1
  ResponseMatrix r = ResponseMatrix::unchecked(1, 1, {2.0}, "one");
  const RngSeed root{55, "mc"};
  const std::size_t n = 10000;
  std::vector<double> deltas(n);
  for (std::size_t i = 0; i < n; ++i)
    deltas[i] = perturb_response(r, 0.05, root.child("draw", i))(0, 0) - 2.0;
  double mean = 0.0;
  for (double d : deltas) mean += d;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double d : deltas) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n - 1);
  const double sd = std::sqrt(var);
  CHECK(std::abs(sd - 0.1) / 0.1 < 0.03);
}

TEST_CASE("perturb_response clamp flag") {
  ResponseMatrix r = ResponseMatrix::unchecked(1, 1, {0.5}, "one");
  const RngSeed root{56, "clamp"};
  bool saw_negative = false;
  for (std::size_t i = 0; i < 2000; ++i) {
    const auto p = perturb_response(r, 1.5, root.child("d", i));
    if (p(0, 0) < 0.0) saw_negative = true;
    const auto c = perturb_response(r, 1.5, root.child("d", i), true);
    CHECK(c(0, 0) >= 0.0);
  }
  CHECK(saw_negative);  // huge alpha must produce negatives without clamping
}

TEST_CASE("perturb_signal relu noise") {
  const auto y = EncodedSignal::raw({1.0, 2.0, 3.0, 4.0});

  SUBCASE("zero sigma is the identity") {
    const auto out = perturb_signal(y, 0.0, RngSeed{1, "s"});
    CHECK(out.values() == y.values());
  }

  SUBCASE("output dominates input for any seed") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto out = perturb_signal(y, 0.5, RngSeed{s, "dom"});
      for (std::size_t i = 0; i < 4; ++i) CHECK(out[i] >= y[i]);
    }
  }

  SUBCASE("normalized input is rejected") {
    const auto norm = EncodedSignal::normalized({0.0, 0.5, 1.0});
    CHECK_THROWS_AS(perturb_signal(norm, 0.1, RngSeed{1, "n"}), NormalizedInput);
  }

  SUBCASE("positive fraction of the relu noise is about one half") {
    // P(N(0, s^2) > 0) = 1/2; 1e5 entries, se ~ 0.0016
    const std::size_t n = 100000;
    const auto big = EncodedSignal::raw(std::vector<double>(n, 1.0));
    const auto out = perturb_signal(big, 1e-5, RngSeed{99, "frac"});
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (out[i] > 1.0) ++positive;
    const double frac = static_cast<double>(positive) / static_cast<double>(n);
    CHECK(std::abs(frac - 0.5) < 0.01);
  }

  SUBCASE("relative sigma mode scales with mean(y)") {
    const auto a = perturb_signal(y, 0.01, RngSeed{7, "rel"}, true);
    const auto b = perturb_signal(y, 0.01 * 2.5, RngSeed{7, "rel"}, false);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("augment produces the S x T lattice") {
  Fixture f;
  HdaConfig cfg;  // S=2, T=4 defaults
  const RngSeed seed{11, "aug"};
  const auto pairs = augment(f.x, f.r, cfg, seed);
  REQUIRE(pairs.size() == 8);

  SUBCASE("all pairs share the unmodified x and carry lattice indices") {
    int idx = 0;
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t t = 0; t < 4; ++t, ++idx) {
        const auto& [pair, rec] = pairs[idx];
        CHECK(pair.x.values() == f.x.values());
        CHECK(pair.provenance == Provenance::Augmented);
        CHECK(pair.s_index == static_cast<int>(s));
        CHECK(pair.t_index == static_cast<int>(t));
        CHECK(rec.s_index == static_cast<int>(s));
        CHECK(rec.t_index == static_cast<int>(t));
      }
    }
  }

  SUBCASE("pair (s,t) equals the manual composition of the two perturbations") {
    for (const auto& [pair, rec] : pairs) {
      const auto rs = perturb_response(f.r, cfg.alpha, rec.delta_seed);
      auto ys = encode(rs, f.x);
      std::vector<double> clamped = ys.values();
      for (auto& v : clamped) v = std::max(0.0, v);
      const auto yst = perturb_signal(EncodedSignal::raw(clamped), cfg.sigma_eps,
                                      rec.eps_seed);
      CHECK(pair.y.values() == yst.values());
    }
  }

  SUBCASE("noiseless config collapses to the plain encode") {
    HdaConfig quiet;
    quiet.alpha = 0.0;
    quiet.sigma_eps = 0.0;
    const auto qs = augment(f.x, f.r, quiet, seed);
    const auto want = encode(f.r, f.x);
    REQUIRE(qs.size() == 8);
    for (const auto& [pair, rec] : qs) CHECK(pair.y.values() == want.values());
  }
}

TEST_CASE("augment nesting: inner pairs share the intermediate signal") {
  Fixture f;
  HdaConfig cfg;
  const RngSeed seed{12, "nest"};

  // regenerating with sigma_eps = 0 exposes y_aug^(s) directly
  HdaConfig no_inner = cfg;
  no_inner.sigma_eps = 0.0;
  const auto outer_only = augment(f.x, f.r, no_inner, seed);
  const auto full = augment(f.x, f.r, cfg, seed);
  REQUIRE(outer_only.size() == full.size());

  for (std::size_t s = 0; s < cfg.s_outer; ++s) {
    const auto& base = outer_only[s * cfg.t_inner].first.y;
    for (std::size_t t = 0; t < cfg.t_inner; ++t) {
      const auto& cell = outer_only[s * cfg.t_inner + t].first.y;
      CHECK(cell.values() == base.values());  // same delta_s, no eps
      // and the noisy version dominates it
      const auto& noisy = full[s * cfg.t_inner + t].first.y;
      for (std::size_t i = 0; i < base.size(); ++i) CHECK(noisy[i] >= base[i]);
    }
  }
}

TEST_CASE("augment determinism") {
  Fixture f;
  HdaConfig cfg;
  const auto a = augment(f.x, f.r, cfg, RngSeed{13, "det"});
  const auto b = augment(f.x, f.r, cfg, RngSeed{13, "det"});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].first.y.values() == b[i].first.y.values());

  const auto c = augment(f.x, f.r, cfg, RngSeed{14, "det"});
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].first.y.values() != c[i].first.y.values()) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("hda config validation") {
  HdaConfig cfg;
  cfg.s_outer = 0;
  CHECK_THROWS_AS(cfg.validate(), BadConfig);
  cfg = HdaConfig{};
  cfg.alpha = -0.1;
  CHECK_THROWS_AS(cfg.validate(), BadConfig);
  cfg = HdaConfig{};
  CHECK(cfg.pairs_per_spectrum() == 8);
}
