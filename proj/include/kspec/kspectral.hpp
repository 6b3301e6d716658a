#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kspec/errors.hpp"
#include "kspec/model_config.hpp"
#include "kspec/signal.hpp"

namespace kspec {

// Sum of the K largest DFT magnitudes. The caller supplies the spectrum of a
// unit-norm signal; ties at the K-th position cannot change the value.
inline double k_spectral(const Spectrum& spec, int k) {
  const std::size_t t = spec.size();
  if (k < 1 || static_cast<std::size_t>(k) > t) {
    throw BadK("k_spectral: K=" + std::to_string(k) + " with T=" +
               std::to_string(t));
  }
  std::vector<double> mags = spec.magnitudes;
  std::nth_element(mags.begin(), mags.begin() + (k - 1), mags.end(),
                   std::greater<double>());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += mags[static_cast<std::size_t>(i)];
  return sum;
}

// Maximum attainable value sqrt(T*K), reached by a flat top-K spectrum of a
// unit-norm signal.
inline double k_spectral_max(std::size_t t, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > t) {
    throw BadK("k_spectral_max: K=" + std::to_string(k) + " with T=" +
               std::to_string(t));
  }
  return std::sqrt(static_cast<double>(t) * static_cast<double>(k));
}

// Channel average of per-channel metric values.
inline double aggregate(const std::vector<double>& per_channel) {
  if (per_channel.empty()) throw EmptyInput();
  double s = 0.0;
  for (double v : per_channel) s += v;
  return s / static_cast<double>(per_channel.size());
}

// K defaults to the SSM state dimension d: identifying a SISO SSM with d
// states needs excitation of order at least d.
inline int default_k(const DeepSsmConfig& cfg) {
  cfg.validate();
  return cfg.state_dim;
}

}  // namespace kspec
