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

#include "srs_sense/bandpass.hpp"

#include <cmath>
#include <complex>

#include "srs_sense/errors.hpp"

namespace srs_sense::filt {

namespace {

using Cplx = std::complex<double>;

/// Cascade response at digital angular frequency w (rad/sample).
double cascade_gain(const std::vector<Biquad>& sos, double w) {
  const Cplx z1 = std::polar(1.0, -w);
  const Cplx z2 = z1 * z1;
  Cplx h{1.0, 0.0};
  for (const Biquad& s : sos) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

}  // namespace

std::vector<Biquad> butterworth_bandpass(double low_hz, double high_hz,
                                         double sample_rate_hz, int order) {
  if (!(low_hz > 0.0) || !(low_hz < high_hz) ||
      !(high_hz < sample_rate_hz / 2.0)) {
    throw ValidationError("bandpass requires 0 < low < high < sample_rate/2");
  }
  if (order < 1) throw ValidationError("filter order must be >= 1");

  const double fs2 = 2.0 * sample_rate_hz;
  const double w1 = fs2 * std::tan(M_PI * low_hz / sample_rate_hz);
  const double w2 = fs2 * std::tan(M_PI * high_hz / sample_rate_hz);
  const double w0_sq = w1 * w2;
  const double bw = w2 - w1;

  // Analog bandpass poles: every prototype pole p maps to the two roots of
  // s^2 - (bw*p)*s + w0^2 = 0, then the bilinear transform takes them to z.
  std::vector<Cplx> poles;
  poles.reserve(static_cast<std::size_t>(2 * order));
  for (int k = 0; k < order; ++k) {
    const double theta =
        M_PI / 2.0 + M_PI * (2.0 * k + 1.0) / (2.0 * order);
    const Cplx proto = std::polar(1.0, theta);
    const Cplx a = proto * (bw / 2.0);
    const Cplx d = std::sqrt(a * a - Cplx{w0_sq, 0.0});
    for (const Cplx s : {a + d, a - d}) {
      poles.push_back((fs2 + s) / (fs2 - s));
    }
  }

  // Pair conjugates into biquads. Numerators carry one zero at z=1 and one
  // at z=-1 each (z^2 - 1), the bilinear image of the N zeros at s=0 and the
  // N at infinity.
  constexpr double kImagTol = 1e-9;
  std::vector<Cplx> upper;
  std::vector<double> reals;
  for (const Cplx& p : poles) {
    if (p.imag() > kImagTol) {
      upper.push_back(p);
    } else if (p.imag() < -kImagTol) {
      // conjugate partner handled via `upper`
    } else {
      reals.push_back(p.real());
    }
  }

  std::vector<Biquad> sos;
  for (const Cplx& p : upper) {
    sos.push_back(Biquad{1.0, 0.0, -1.0, -2.0 * p.real(), std::norm(p)});
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    sos.push_back(Biquad{1.0, 0.0, -1.0, -(reals[i] + reals[i + 1]),
                         reals[i] * reals[i + 1]});
  }
  if (sos.size() != static_cast<std::size_t>(order)) {
    throw ValidationError("bandpass pole pairing failed");
  }

  const double wc = 2.0 * M_PI * std::sqrt(low_hz * high_hz) / sample_rate_hz;
  const double gain = cascade_gain(sos, wc);
  sos[0].b0 /= gain;
  sos[0].b1 /= gain;
  sos[0].b2 /= gain;
  return sos;
}

namespace {

/// One section, transposed direct form II, with externally supplied state.
void run_section(const Biquad& s, Series& x, double z1, double z2) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double in = x[i];
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    x[i] = out;
  }
}

/// Applies the cascade with initial conditions matched to a step of height
/// x[0], so constant inputs produce no start-up transient.
void cascade_with_zi(const std::vector<Biquad>& sos, Series& x) {
  if (x.size() == 0) return;
  double scale = x[0];
  for (const Biquad& s : sos) {
    const double dc_num = s.b0 + s.b1 + s.b2;
    const double dc_den = 1.0 + s.a1 + s.a2;
    const double h_dc = dc_num / dc_den;
    const double z1 = (h_dc - s.b0) * scale;
    const double z2 = (s.b2 - s.a2 * h_dc) * scale;
    run_section(s, x, z1, z2);
    scale *= h_dc;
  }
}

}  // namespace

Series sosfilt(const std::vector<Biquad>& sos, const Series& x) {
  Series y = x;
  cascade_with_zi(sos, y);
  return y;
}

Series filtfilt(const std::vector<Biquad>& sos, const Series& x, int pad_len) {
  const auto n = static_cast<int>(x.size());
  if (n < 2) throw InsufficientDataError("filtfilt needs at least 2 samples");
  const int p = std::min(pad_len, n - 1);

  Series ext(n + 2 * p);
  for (int i = 0; i < p; ++i) ext[i] = 2.0 * x[0] - x[p - i];
  ext.segment(p, n) = x;
  for (int i = 0; i < p; ++i) ext[p + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  cascade_with_zi(sos, ext);
  ext.reverseInPlace();
  cascade_with_zi(sos, ext);
  ext.reverseInPlace();

  return ext.segment(p, n);
}

}  // namespace srs_sense::filt
