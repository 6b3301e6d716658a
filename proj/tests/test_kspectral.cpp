#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kspec/fig2.hpp"
#include "kspec/kspectral.hpp"
#include "oracles.hpp"

using namespace kspec;

namespace {

Spectrum spectrum_of(std::vector<double> mags) {
  Spectrum sp;
  sp.source_length = mags.size();
  sp.magnitudes = std::move(mags);
  return sp;
}

}  // namespace

TEST_CASE("k_spectral: unit-norm constant, K=1 hits the maximum") {
  const Spectrum sp = dft_magnitudes({0.5, 0.5, 0.5, 0.5});
  CHECK(k_spectral(sp, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(k_spectral(sp, 1) == doctest::Approx(k_spectral_max(4, 1)));
}

TEST_CASE("k_spectral: same spectrum, K=2 is not maximal") {
  const Spectrum sp = dft_magnitudes({0.5, 0.5, 0.5, 0.5});
  CHECK(k_spectral(sp, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(k_spectral(sp, 2) < k_spectral_max(4, 2));
}

TEST_CASE("k_spectral: flat top-K spectrum scores sqrt(T*K)") {
  const std::size_t t = 16;
  const int k = 5;
  std::vector<double> mags(t, 0.0);
  for (int i = 0; i < k; ++i) {
    mags[static_cast<std::size_t>(3 + i)] = std::sqrt(static_cast<double>(t) / k);
  }
  CHECK(k_spectral(spectrum_of(mags), k) ==
        doctest::Approx(std::sqrt(static_cast<double>(t) * k)).epsilon(1e-12));
}

TEST_CASE("k_spectral_max values") {
  CHECK(k_spectral_max(4, 2) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(k_spectral_max(9, 9) == doctest::Approx(9.0));
  CHECK(k_spectral_max(25, 1) == doctest::Approx(5.0));
}

TEST_CASE("BadK is strict, no clamping") {
  const Spectrum sp = dft_magnitudes({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(k_spectral(sp, 0), BadK);
  CHECK_THROWS_AS(k_spectral(sp, 4), BadK);
  CHECK_THROWS_AS(k_spectral_max(3, 0), BadK);
  CHECK_THROWS_AS(k_spectral_max(3, 4), BadK);
}

TEST_CASE("upper bound sqrt(T*K) for random unit-norm signals") {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t t = 8 + rng.next_u64() % 120;
    const int k = 1 + static_cast<int>(rng.next_u64() % t);
    const Spectrum sp = dft_magnitudes(oracles::random_unit_signal(t, rng));
    CHECK(k_spectral(sp, k) <= k_spectral_max(t, k) + 1e-9);
  }
}

TEST_CASE("monotone in K") {
  Rng rng(23);
  const Spectrum sp = dft_magnitudes(oracles::random_unit_signal(40, rng));
  for (int k = 1; k < 40; ++k) {
    CHECK(k_spectral(sp, k + 1) >= k_spectral(sp, k) - 1e-15);
  }
}

TEST_CASE("phase invariance: per-bin phase does not change the metric") {
  // two sinusoids at the same bins with different phases
  const std::size_t t = 64;
  const double pi = 3.14159265358979323846;
  Signal a(t), b(t);
  for (std::size_t i = 0; i < t; ++i) {
    const double x = 2.0 * pi * 5.0 * static_cast<double>(i) / static_cast<double>(t);
    a[i] = std::sin(x);
    b[i] = std::sin(x + 1.234);
  }
  const double ra = k_spectral(dft_magnitudes(normalize(a)), 4);
  const double rb = k_spectral(dft_magnitudes(normalize(b)), 4);
  CHECK(ra == doctest::Approx(rb).epsilon(1e-9));
}

TEST_CASE("metric is invariant to uniform scaling before normalization") {
  Rng rng(31);
  const Signal x = oracles::random_signal(100, rng);
  Signal scaled(x);
  for (double& v : scaled) v *= -7.25;
  const double r1 = k_spectral(dft_magnitudes(normalize(x)), 6);
  const double r2 = k_spectral(dft_magnitudes(normalize(scaled)), 6);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("aggregate") {
  CHECK(aggregate({2.0, 4.0}) == doctest::Approx(3.0));
  CHECK(aggregate({5.5}) == doctest::Approx(5.5));
  CHECK_THROWS_AS(aggregate({}), EmptyInput);
}

TEST_CASE("default_k returns the state dimension") {
  DeepSsmConfig cfg;
  cfg.state_dim = 4;
  CHECK(default_k(cfg) == 4);
  cfg.state_dim = 16;
  CHECK(default_k(cfg) == 16);
}

TEST_CASE("four-signal demo ordering: 1 > 4 > 3 > 2") {
  const Fig2Demo demo = fig2_demo();
  CHECK(demo.r[0] > demo.r[3]);
  CHECK(demo.r[3] > demo.r[2]);
  CHECK(demo.r[2] > demo.r[1]);
  // all bounded by the theorem maximum
  for (double r : demo.r) {
    CHECK(r <= k_spectral_max(demo.t_len, demo.k) + 1e-9);
  }
}
