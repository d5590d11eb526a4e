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
#include <vector>

namespace srs_sense::filt {

using Series = Eigen::ArrayXd;

/// One second-order section, normalized so a0 = 1.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

/// Butterworth bandpass as cascaded second-order sections. `order` is the
/// analog prototype order; the digital filter has 2*order poles. Designed by
/// pole placement: prewarp, lowpass-to-bandpass transform, bilinear map.
/// Unity gain at the geometric band center.
std::vector<Biquad> butterworth_bandpass(double low_hz, double high_hz,
                                         double sample_rate_hz, int order = 4);

/// Single forward pass through the cascade with step-matched initial state.
Series sosfilt(const std::vector<Biquad>& sos, const Series& x);

/// Forward-backward (zero-phase) filtering with odd-reflection padding of
/// pad_len samples on each side.
Series filtfilt(const std::vector<Biquad>& sos, const Series& x, int pad_len);

}  // namespace srs_sense::filt
