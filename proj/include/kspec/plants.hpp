#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kspec/errors.hpp"
#include "kspec/rng.hpp"
#include "kspec/signal.hpp"
#include "kspec/ssm.hpp"

namespace kspec {

struct NoiseConfig {
  double sigma = 0.0;  // standard deviation of the additive output noise
  std::uint64_t seed = 0;
};

enum class PlantKind { Wiener, Hammerstein };

inline std::string to_string(PlantKind kind) {
  return kind == PlantKind::Wiener ? "wiener" : "hammerstein";
}

inline PlantKind plant_from_string(const std::string& s) {
  if (s == "wiener") return PlantKind::Wiener;
  if (s == "hammerstein") return PlantKind::Hammerstein;
  throw ConfigError("unknown plant kind: " + s);
}

// Control-valve linear block: (0.1044 q^-1 + 0.0883 q^-2) /
// (1 - 1.4138 q^-1 + 0.6065 q^-2), DC gain 1.
inline TransferFunction wiener_linear_block() {
  TransferFunction tf;
  tf.num = {0.0, 0.1044, 0.0883};
  tf.den = {1.0, -1.4138, 0.6065};
  return tf;
}

inline void add_noise(Signal& y, const NoiseConfig& noise) {
  if (noise.sigma <= 0.0) return;
  Rng rng(noise.seed);
  for (double& v : y) v += rng.gaussian(0.0, noise.sigma);
}

// Wiener plant: linear block then saturation v / sqrt(0.10 + 0.90 v^2),
// plus observation noise. |y| < 1/sqrt(0.9) noiseless.
inline Signal wiener_response(const Signal& u, const NoiseConfig& noise) {
  if (u.empty()) throw DimensionMismatch("wiener_response: empty input");
  const Signal v = simulate_transfer(wiener_linear_block(), u);
  Signal y(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    y[t] = v[t] / std::sqrt(0.10 + 0.90 * v[t] * v[t]);
  }
  add_noise(y, noise);
  return y;
}

// Hammerstein plant: polynomial nonlinearity v = u + 3u^2 + 2u^3 followed by
// an 8-tap FIR with theta = [1, 2, 0.3, 4, 1, 1, 1, 0.5], v_{t<0} = 0.
inline Signal hammerstein_response(const Signal& u, const NoiseConfig& noise) {
  if (u.empty()) throw DimensionMismatch("hammerstein_response: empty input");
  static const double taps[8] = {1.0, 2.0, 0.3, 4.0, 1.0, 1.0, 1.0, 0.5};
  Signal v(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    v[t] = u[t] + 3.0 * u[t] * u[t] + 2.0 * u[t] * u[t] * u[t];
  }
  Signal y(u.size(), 0.0);
  for (std::size_t t = 0; t < u.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= 8 && i <= t; ++i) {
      acc += taps[i - 1] * v[t - i];
    }
    y[t] = acc;
  }
  add_noise(y, noise);
  return y;
}

inline Signal plant_response(PlantKind kind, const Signal& u,
                             const NoiseConfig& noise) {
  return kind == PlantKind::Wiener ? wiener_response(u, noise)
                                   : hammerstein_response(u, noise);
}

}  // namespace kspec
