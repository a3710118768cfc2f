// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_FFT_HPP_
#define EHNET_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

#include "ehnet/common.hpp"

namespace ehnet {

using Cpx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT. Frame sizes in this codebase are small
// powers of two (<= 512), so a plain implementation is plenty and keeps the
// transform bit-reproducible.
inline void fft_inplace(std::vector<Cpx>& a) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) {
    throw ConfigError("fft size must be a power of two");
  }
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(a[i], a[j]);
    }
  }
  const double pi = 3.141592653589793238462643383279502884;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * pi / static_cast<double>(len);
    const Cpx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Cpx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Cpx u = a[i + k];
        const Cpx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline void ifft_inplace(std::vector<Cpx>& a) {
  for (auto& x : a) x = std::conj(x);
  fft_inplace(a);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (auto& x : a) x = std::conj(x) * inv;
}

}  // namespace ehnet

#endif  // EHNET_FFT_HPP_
