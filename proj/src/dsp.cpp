// SPDX-License-Identifier: Apache-2.0
//
// srs-sense: sleep sensing from uplink 5G channel state information
// Copyright (C) 2026 srs-sense contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "srs_sense/dsp.hpp"

#include <cmath>

#include "srs_sense/errors.hpp"

namespace srs_sense::dsp {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0) {
    throw ValidationError("fft length must be a power of two, got " +
                          std::to_string(n));
  }

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  for (std::size_t m = 2; m <= n; m <<= 1) {
    const std::size_t half = m >> 1;
    for (std::size_t j = 0; j < half; ++j) {
      const std::complex<double> w =
          std::polar(1.0, -2.0 * M_PI * static_cast<double>(j) /
                              static_cast<double>(m));
      for (std::size_t k = j; k < n; k += m) {
        const std::complex<double> t = w * x[k + half];
        x[k + half] = x[k] - t;
        x[k] += t;
      }
    }
  }
}

Series hann_window(int n) {
  Series w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
  }
  return w;
}

Spectrum magnitude_spectrum(const Series& x, double sample_rate_hz,
                            int pad_factor) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n < 2) throw InsufficientDataError("spectrum needs at least 2 samples");
  const std::size_t nfft = next_pow2(n * static_cast<std::size_t>(pad_factor));

  const Series w = hann_window(static_cast<int>(n));
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = {x[static_cast<Eigen::Index>(i)] * w[static_cast<Eigen::Index>(i)], 0.0};
  fft_inplace(buf);

  Spectrum out;
  const std::size_t half = nfft / 2;
  out.magnitude.resize(static_cast<Eigen::Index>(half + 1));
  for (std::size_t b = 0; b <= half; ++b) out.magnitude[static_cast<Eigen::Index>(b)] = std::abs(buf[b]);
  out.bin_hz = sample_rate_hz / static_cast<double>(nfft);
  return out;
}

double goertzel_power(const Series& x, int bin) {
  const auto n = static_cast<int>(x.size());
  const double w = 2.0 * M_PI * bin / n;
  const double coeff = 2.0 * std::cos(w);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    s0 = x[i] + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

double band_power_fraction(const Series& x, double low_hz, double high_hz,
                           double sample_rate_hz) {
  const auto n = static_cast<int>(x.size());
  if (n < 2) return 0.0;
  const Series centered = x - x.mean();
  const double total = centered.square().sum();
  if (total < 1e-30) return 0.0;

  const double bin_hz = sample_rate_hz / n;
  int lo_bin = static_cast<int>(std::ceil(low_hz / bin_hz - 1e-9));
  int hi_bin = static_cast<int>(std::floor(high_hz / bin_hz + 1e-9));
  lo_bin = std::max(lo_bin, 1);
  hi_bin = std::min(hi_bin, n / 2);
  if (hi_bin < lo_bin) return 0.0;

  double band = 0.0;
  for (int b = lo_bin; b <= hi_bin; ++b) {
    double p = goertzel_power(centered, b);
    // Real signal: count the conjugate-mirror bin, except at Nyquist/DC.
    if (b != 0 && 2 * b != n) p *= 2.0;
    band += p;
  }
  // Parseval: sum_b |X_b|^2 = n * sum_t x_t^2.
  const double fraction = band / (static_cast<double>(n) * total);
  return std::min(fraction, 1.0);
}

}  // namespace srs_sense::dsp
