#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "levyrisk/errors.hpp"

namespace levyrisk::detail {

// Iterative radix-2 Cooley-Tukey transform; a.size() must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw invalid_input("fft_radix2: size must be a power of two");
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Twiddles from sincos each time: slower than a recurrence but free of
        // accumulated drift, and convolution sizes here are modest.
        const std::complex<double> w(std::cos(ang * static_cast<double>(k)),
                                     std::sin(ang * static_cast<double>(k)));
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

// Linear convolution of two nonnegative mass vectors, truncated to the first
// out_size entries. Tiny negative round-off is clipped to zero.
inline std::vector<double> convolve_masses_fft(const std::vector<double>& p,
                                               const std::vector<double>& q,
                                               std::size_t out_size) {
  const std::size_t full = p.size() + q.size() - 1;
  std::size_t m = 1;
  while (m < full) m <<= 1;
  std::vector<std::complex<double>> fa(m), fb(m);
  for (std::size_t i = 0; i < p.size(); ++i) fa[i] = p[i];
  for (std::size_t i = 0; i < q.size(); ++i) fb[i] = q[i];
  fft_radix2(fa, false);
  fft_radix2(fb, false);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  fft_radix2(fa, true);
  std::vector<double> out(out_size, 0.0);
  const std::size_t upto = std::min(out_size, full);
  for (std::size_t i = 0; i < upto; ++i) {
    out[i] = std::max(0.0, fa[i].real());
  }
  return out;
}

// Reference O(n*m) convolution, truncated to out_size entries.
inline std::vector<double> convolve_masses_direct(const std::vector<double>& p,
                                                  const std::vector<double>& q,
                                                  std::size_t out_size) {
  std::vector<double> out(out_size, 0.0);
  for (std::size_t i = 0; i < p.size() && i < out_size; ++i) {
    if (p[i] == 0.0) continue;
    const std::size_t jmax = std::min(q.size(), out_size - i);
    for (std::size_t j = 0; j < jmax; ++j) {
      out[i + j] += p[i] * q[j];
    }
  }
  return out;
}

}  // namespace levyrisk::detail
