#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kspec/errors.hpp"
#include "kspec/fft.hpp"

namespace kspec {

// Finite real-valued time series, one sample per step.
using Signal = std::vector<double>;

// DFT magnitudes of a signal; all T bins are kept, including the
// conjugate-symmetric half.
struct Spectrum {
  std::vector<double> magnitudes;
  std::size_t source_length = 0;

  std::size_t size() const { return magnitudes.size(); }
};

inline double l2_norm(const Signal& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline bool all_finite(const Signal& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Divide by the Euclidean norm. Throws ZeroSignal on a dead channel; the
// caller decides whether to skip it.
inline Signal normalize(const Signal& x) {
  const double n = l2_norm(x);
  if (n == 0.0) throw ZeroSignal();
  Signal out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / n;
  return out;
}

// |sum_t x_t exp(-j 2 pi s t / T)| for s = 0..T-1.
inline Spectrum dft_magnitudes(const Signal& x) {
  Spectrum sp;
  sp.source_length = x.size();
  const auto c = fft::dft_real(x);
  sp.magnitudes.resize(c.size());
  for (std::size_t s = 0; s < c.size(); ++s) sp.magnitudes[s] = std::abs(c[s]);
  return sp;
}

inline double mse(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("mse: lengths " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

}  // namespace kspec
