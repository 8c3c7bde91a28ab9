// Copyright 2026 The mayek-tts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Iterative radix-2 complex FFT. Frame lengths in this codebase are powers of
// two (n_fft = 1024), so a general-length transform is not needed.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "mayektts/common.hpp"

namespace mayektts {

namespace detail {
inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace detail

// In-place decimation-in-time FFT. inverse=true applies conj-FFT-conj with
// the 1/n scale, i.e. the exact inverse of the forward transform.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (!detail::is_pow2(n)) {
    throw Error(ErrorCode::ShapeMismatch, "fft length must be a power of two");
  }
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

// Real-input forward FFT returning the n/2+1 non-negative-frequency bins.
inline std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  std::vector<std::complex<double>> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
  fft_inplace(a, false);
  a.resize(x.size() / 2 + 1);
  return a;
}

// Inverse of rfft: reconstructs the full hermitian spectrum, then inverts.
inline std::vector<double> irfft(const std::vector<std::complex<double>>& half, std::size_t n) {
  if (half.size() != n / 2 + 1) {
    throw Error(ErrorCode::ShapeMismatch, "irfft: expected n/2+1 bins");
  }
  std::vector<std::complex<double>> a(n);
  for (std::size_t k = 0; k < half.size(); ++k) a[k] = half[k];
  for (std::size_t k = half.size(); k < n; ++k) a[k] = std::conj(half[n - k]);
  fft_inplace(a, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
  return out;
}

}  // namespace mayektts
