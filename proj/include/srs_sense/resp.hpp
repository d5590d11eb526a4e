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

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srs_sense/csi.hpp"

namespace srs_sense {

/// Respiration band. Human breathing sits in 0.1-0.5 Hz even across
/// irregular patterns; the 20 ms sounding cadence gives 50 Hz sampling.
struct BandConfig {
  double low_hz = 0.1;
  double high_hz = 0.5;
  double sample_rate_hz = 50.0;
};

void validate(const BandConfig& band);

/// Zero-phase Butterworth bandpass (4th-order prototype, forward-backward).
/// Requires at least one full low_hz period of samples.
Series bandpass(const Series& series, const BandConfig& band);

struct SubcarrierChoice {
  int antenna = 0;
  int subcarrier = 0;
};

/// Picks the (antenna, subcarrier) whose mean-removed amplitude series has
/// the largest in-band-to-total power ratio. Ties break toward the smallest
/// (antenna, subcarrier).
SubcarrierChoice select_subcarrier(const FeatureTensors& features,
                                   const BandConfig& band);
SubcarrierChoice select_subcarrier(const FeatureTensors& features,
                                   const BandConfig& band,
                                   const SubcarrierMask& mask);

/// Local maxima at least min_distance_s apart with prominence at or above
/// min_prominence. Returns strictly increasing times in seconds relative to
/// the start of the series.
std::vector<double> detect_peaks(const Series& series, double sample_rate_hz,
                                 double min_distance_s, double min_prominence);

/// Breaths per minute from peak times: 60*(n-1)/(t_n - t_1).
std::optional<double> rate_from_peaks(const std::vector<double>& peak_times_s);

enum class Modality { amplitude, phase };

const char* to_string(Modality m);

/// In-band signal quality of one modality: the fraction of band magnitude
/// concentrated at the dominant bin.
struct SpectralReport {
  Modality modality = Modality::amplitude;
  double f_star_hz = 0.0;
  double q_spec = 0.0;
};

/// Windowed (Hann) FFT zero-padded to the next power of two >= 4x the series
/// length; f* and q are taken over the bins inside [low_hz, high_hz].
SpectralReport spectral_concentration(const Series& series,
                                      const BandConfig& band, Modality m);

/// Bandpass-filtered amplitude and phase series of one (antenna, subcarrier).
struct FilteredSignals {
  Series x_a;
  Series x_p;
  SubcarrierChoice source;
};

FilteredSignals filtered_signals(const FeatureTensors& features,
                                 SubcarrierChoice choice,
                                 const BandConfig& band);

struct WindowSec {
  double begin_s = 0.0;
  double end_s = 0.0;
  double length() const { return end_s - begin_s; }
};

struct RespirationEstimate {
  double rate_bpm = 0.0;
  Modality chosen_modality = Modality::amplitude;
  SpectralReport amplitude_report;
  SpectralReport phase_report;
  std::vector<double> peak_times_s;  // absolute, recording time base
  WindowSec window;
  SubcarrierChoice source;
};

/// Shortest window accepted by the estimator: three periods at the 0.1 Hz
/// band edge.
inline constexpr double kMinEstimationWindowS = 30.0;

/// Full pipeline: mask, antenna-ratio normalize, feature extraction,
/// subcarrier selection, per-modality bandpass + spectral report, modality
/// choice by q, rate from time-domain peaks (spectral fallback when fewer
/// than two peaks survive).
RespirationEstimate estimate_respiration(const CsiRecording& rec,
                                         WindowSec window,
                                         const BandConfig& band = {});

nlohmann::json estimate_to_json(const RespirationEstimate& est);

}  // namespace srs_sense
