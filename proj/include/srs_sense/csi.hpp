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
#include <vector>

#include "srs_sense/errors.hpp"

namespace srs_sense {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;  // subcarrier x frame
using RMatrix = Eigen::MatrixXd;   // subcarrier x frame
using Series = Eigen::ArrayXd;

/// Reference magnitudes below this are numerically unusable as divisors.
inline constexpr double kDegenerateMagnitude = 1e-12;

/// Received and transmitted reference symbols on the sounding grid.
/// Both matrices are [subcarrier x frame].
struct SounderGrid {
  CMatrix received;
  CMatrix reference;
};

/// Per-subcarrier channel estimate: H(k,t) = Y(k,t) / X(k,t).
CMatrix estimate_csi(const SounderGrid& grid);

/// Complex CSI over (antenna, subcarrier, frame), one matrix per antenna.
/// Columns are frames, so one column holds a full sounding snapshot.
struct CsiRecording {
  std::vector<CMatrix> antennas;
  double frame_interval = 0.020;  // seconds between CSI snapshots
  double carrier_hz = 3.5e9;

  int antenna_count() const { return static_cast<int>(antennas.size()); }
  int subcarrier_count() const {
    return antennas.empty() ? 0 : static_cast<int>(antennas[0].rows());
  }
  int frame_count() const {
    return antennas.empty() ? 0 : static_cast<int>(antennas[0].cols());
  }
  double duration() const { return frame_count() * frame_interval; }
};

/// Checks dimension consistency, counts, and finiteness of every sample.
void validate_recording(const CsiRecording& rec);

/// Antenna-ratio CSI: every antenna divided by the reference antenna, so
/// offsets common to all antennas cancel. The reference slice is 1+0j.
struct NormalizedCsi {
  std::vector<CMatrix> antennas;
  int ref_antenna = 0;
  double frame_interval = 0.020;

  int antenna_count() const { return static_cast<int>(antennas.size()); }
  int subcarrier_count() const {
    return antennas.empty() ? 0 : static_cast<int>(antennas[0].rows());
  }
  int frame_count() const {
    return antennas.empty() ? 0 : static_cast<int>(antennas[0].cols());
  }
};

/// true = usable. Subcarriers whose reference-antenna magnitude dips below
/// 1e-6 x the median magnitude in any frame are masked out; deep fades make
/// the ratio meaningless.
using SubcarrierMask = std::vector<bool>;

SubcarrierMask usable_subcarriers(const CsiRecording& rec, int ref_antenna);

NormalizedCsi normalize_antenna_ratio(const CsiRecording& rec,
                                      int ref_antenna = 0);

/// Masked subcarriers are filled with 1+0j instead of being divided; a
/// degenerate reference sample on an unmasked subcarrier still throws.
NormalizedCsi normalize_antenna_ratio(const CsiRecording& rec, int ref_antenna,
                                      const SubcarrierMask& mask);

/// Amplitude and unwrapped phase of the normalized CSI.
struct FeatureTensors {
  std::vector<RMatrix> amplitude;  // |H~|, dimensionless
  std::vector<RMatrix> phase;      // unwrap(angle(H~)) along frames, radians
  double frame_interval = 0.020;

  int antenna_count() const { return static_cast<int>(amplitude.size()); }
  int subcarrier_count() const {
    return amplitude.empty() ? 0 : static_cast<int>(amplitude[0].rows());
  }
  int frame_count() const {
    return amplitude.empty() ? 0 : static_cast<int>(amplitude[0].cols());
  }
};

FeatureTensors extract_features(const NormalizedCsi& norm);

/// Sequential unwrap of one angle series: steps beyond pi are folded back.
Series unwrap_phase(const Series& wrapped);

/// S(t) = sum_k |H(k,t) - H(k,t-1)| at one antenna; length frame_count - 1.
Series frame_delta(const CsiRecording& rec, int antenna);

}  // namespace srs_sense
