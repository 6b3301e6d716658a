#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "kspec/io.hpp"
#include "kspec/signal.hpp"
#include "oracles.hpp"

using namespace kspec;

TEST_CASE("normalize: 3-4-5 triangle") {
  const Signal out = normalize({3.0, 4.0});
  CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("normalize: already unit norm") {
  const Signal out = normalize({1.0, 0.0, 0.0, 0.0});
  CHECK(out == Signal{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("normalize: result has unit norm") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Signal x = oracles::random_signal(64, rng);
    CHECK(l2_norm(normalize(x)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("normalize: zero signal throws") {
  CHECK_THROWS_AS(normalize({0.0, 0.0}), ZeroSignal);
}

TEST_CASE("dft_magnitudes: DC-only signal") {
  const Spectrum sp = dft_magnitudes({1.0, 1.0, 1.0, 1.0});
  REQUIRE(sp.size() == 4);
  CHECK(sp.magnitudes[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(sp.magnitudes[1] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(sp.magnitudes[2] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(sp.magnitudes[3] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("dft_magnitudes: Nyquist-only signal") {
  const Spectrum sp = dft_magnitudes({1.0, -1.0, 1.0, -1.0});
  CHECK(sp.magnitudes[0] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(sp.magnitudes[2] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("dft_magnitudes: unit-norm constant satisfies Parseval") {
  const Spectrum sp = dft_magnitudes({0.5, 0.5, 0.5, 0.5});
  CHECK(sp.magnitudes[0] == doctest::Approx(2.0).epsilon(1e-12));
  double power = 0.0;
  for (double m : sp.magnitudes) power += m * m;
  CHECK(power == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("dft_magnitudes matches naive DFT oracle, T in 1..256") {
  Rng rng(42);
  for (std::size_t t = 1; t <= 256; ++t) {
    const Signal x = oracles::random_signal(t, rng);
    const Spectrum sp = dft_magnitudes(x);
    const auto ref = oracles::naive_dft_magnitudes(x);
    REQUIRE(sp.size() == t);
    for (std::size_t s = 0; s < t; ++s) {
      CHECK(std::abs(sp.magnitudes[s] - ref[s]) < 1e-9);
    }
  }
}

TEST_CASE("conjugate symmetry of real-signal spectra") {
  Rng rng(7);
  for (std::size_t t : {5, 16, 37, 100}) {
    const Spectrum sp = dft_magnitudes(oracles::random_signal(t, rng));
    for (std::size_t s = 1; s < t; ++s) {
      CHECK(std::abs(sp.magnitudes[s] - sp.magnitudes[t - s]) < 1e-9);
    }
  }
}

TEST_CASE("Parseval for unit-norm signals") {
  Rng rng(3);
  for (std::size_t t : {4, 33, 128, 1000}) {
    const Signal x = oracles::random_unit_signal(t, rng);
    const Spectrum sp = dft_magnitudes(x);
    double power = 0.0;
    for (double m : sp.magnitudes) power += m * m;
    CHECK(power == doctest::Approx(static_cast<double>(t)).epsilon(1e-6));
  }
}

TEST_CASE("magnitude spectrum is invariant to circular shifts") {
  Rng rng(9);
  const std::size_t t = 50;
  const Signal x = oracles::random_signal(t, rng);
  const Spectrum base = dft_magnitudes(x);
  for (std::size_t shift : {1ul, 7ul, 25ul}) {
    Signal shifted(t);
    for (std::size_t i = 0; i < t; ++i) shifted[(i + shift) % t] = x[i];
    const Spectrum sp = dft_magnitudes(shifted);
    for (std::size_t s = 0; s < t; ++s) {
      CHECK(std::abs(sp.magnitudes[s] - base.magnitudes[s]) < 1e-9);
    }
  }
}

TEST_CASE("mse basics") {
  CHECK(mse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(mse({0.0, 0.0}, {2.0, 0.0}) == doctest::Approx(2.0));
  CHECK(mse({1.0, 2.0, 3.0}, {2.0, 3.0, 5.0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(mse({1.0}, {1.0, 2.0}), LengthMismatch);
}

TEST_CASE("signal CSV and binary round trips") {
  Rng rng(5);
  const Signal x = oracles::random_signal(37, rng);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string csv = (dir / "kspec_sig_test.csv").string();
  const std::string bin = (dir / "kspec_sig_test.bin").string();

  write_signal_csv(csv, x);
  CHECK(read_signal_csv(csv) == x);
  write_signal_bin(bin, x);
  CHECK(read_signal_bin(bin) == x);

  std::filesystem::remove(csv);
  std::filesystem::remove(bin);
}
