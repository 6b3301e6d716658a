#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace kspec::fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

// Bluestein chirp-z transform: DFT of arbitrary length via a power-of-two
// convolution. Keeps the whole pipeline O(n log n) for the prime-ish lengths
// the harness uses (T = 2000, 10000, ...).
inline std::vector<cplx> fft_bluestein(const std::vector<cplx>& x) {
  const std::size_t n = x.size();
  const std::size_t m = next_pow2(2 * n - 1);
  const double pi = 3.14159265358979323846;

  std::vector<cplx> w(n);  // chirp: exp(-i pi k^2 / n)
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n avoids large-angle precision loss
    const std::size_t k2 = static_cast<std::size_t>(
        (static_cast<unsigned long long>(k) * k) % (2 * n));
    const double ang = pi * static_cast<double>(k2) / static_cast<double>(n);
    w[k] = cplx(std::cos(ang), -std::sin(ang));
  }

  std::vector<cplx> a(m, cplx(0.0, 0.0));
  std::vector<cplx> b(m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
  b[0] = std::conj(w[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = std::conj(w[k]);
    b[m - k] = b[k];
  }

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);

  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * w[k];
  return out;
}

// Forward DFT of arbitrary length: X_s = sum_t x_t exp(-j 2 pi s t / n).
inline std::vector<cplx> dft(std::vector<cplx> x) {
  if (x.size() <= 1) return x;
  if (is_pow2(x.size())) {
    fft_pow2(x, false);
    return x;
  }
  return fft_bluestein(x);
}

inline std::vector<cplx> dft_real(const std::vector<double>& x) {
  std::vector<cplx> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = cplx(x[i], 0.0);
  return dft(std::move(c));
}

}  // namespace kspec::fft
