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

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace srs_sense::dsp {

using Series = Eigen::ArrayXd;

std::size_t next_pow2(std::size_t n);

/// In-place radix-2 FFT; x.size() must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x);

/// Symmetric Hann window of length n.
Series hann_window(int n);

struct Spectrum {
  Series magnitude;  ///< |X(f)| for bins 0..nfft/2
  double bin_hz;     ///< frequency spacing between bins
};

/// Magnitude spectrum of a Hann-windowed series, zero-padded to the next
/// power of two >= pad_factor * length. Only the non-negative half is kept.
Spectrum magnitude_spectrum(const Series& x, double sample_rate_hz,
                            int pad_factor = 4);

/// |X_bin|^2 of the length-n DFT of x, via the Goertzel recurrence.
double goertzel_power(const Series& x, int bin);

/// Fraction of the mean-removed series' power that falls inside
/// [low_hz, high_hz] (counting the conjugate mirror). Returns 0 for
/// (near-)constant series.
double band_power_fraction(const Series& x, double low_hz, double high_hz,
                           double sample_rate_hz);

}  // namespace srs_sense::dsp
