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

#include "srs_sense/resp.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "srs_sense/bandpass.hpp"
#include "srs_sense/dsp.hpp"

namespace srs_sense {

void validate(const BandConfig& band) {
  if (!(band.low_hz > 0.0) || !(band.low_hz < band.high_hz) ||
      !(band.high_hz < band.sample_rate_hz / 2.0)) {
    throw ValidationError("band requires 0 < low_hz < high_hz < sample_rate/2");
  }
}

Series bandpass(const Series& series, const BandConfig& band) {
  validate(band);
  const auto min_len =
      static_cast<Eigen::Index>(std::ceil(band.sample_rate_hz / band.low_hz));
  if (series.size() < min_len) {
    throw InsufficientDataError(
        "bandpass needs at least " + std::to_string(min_len) +
        " samples (one full period at " + std::to_string(band.low_hz) +
        " Hz), got " + std::to_string(series.size()));
  }
  const auto sos = filt::butterworth_bandpass(band.low_hz, band.high_hz,
                                              band.sample_rate_hz);
  const int pad =
      static_cast<int>(std::lround(3.0 * band.sample_rate_hz / band.low_hz));
  return filt::filtfilt(sos, series, pad);
}

namespace {

SubcarrierChoice select_impl(const FeatureTensors& features,
                             const BandConfig& band,
                             const SubcarrierMask* mask) {
  validate(band);
  const int antennas = features.antenna_count();
  const int subcarriers = features.subcarrier_count();
  if (antennas == 0 || subcarriers == 0) {
    throw ValidationError("empty feature tensors");
  }
  bool any_usable = false;
  SubcarrierChoice best{0, 0};
  double best_score = -1.0;
  Series series(features.frame_count());
  for (int i = 0; i < antennas; ++i) {
    for (int k = 0; k < subcarriers; ++k) {
      if (mask && !(*mask)[static_cast<std::size_t>(k)]) continue;
      if (!any_usable) {
        any_usable = true;
        best = {i, k};
      }
      series = features.amplitude[i].row(k).transpose().array();
      const double score = dsp::band_power_fraction(
          series, band.low_hz, band.high_hz, band.sample_rate_hz);
      if (score > best_score) {
        best_score = score;
        best = {i, k};
      }
    }
  }
  if (!any_usable) {
    throw ValidationError("no usable subcarrier: all are masked");
  }
  return best;
}

}  // namespace

SubcarrierChoice select_subcarrier(const FeatureTensors& features,
                                   const BandConfig& band) {
  return select_impl(features, band, nullptr);
}

SubcarrierChoice select_subcarrier(const FeatureTensors& features,
                                   const BandConfig& band,
                                   const SubcarrierMask& mask) {
  if (mask.size() != static_cast<std::size_t>(features.subcarrier_count())) {
    throw ValidationError("subcarrier mask size mismatch");
  }
  return select_impl(features, band, &mask);
}

namespace {

struct Candidate {
  int index;
  double height;
  double prominence;
};

std::vector<int> local_maxima(const Series& x) {
  std::vector<int> peaks;
  const auto n = static_cast<int>(x.size());
  int i = 1;
  while (i < n - 1) {
    if (x[i - 1] < x[i]) {
      int ahead = i + 1;
      while (ahead < n - 1 && x[ahead] == x[i]) ++ahead;  // walk plateaus
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

double peak_prominence(const Series& x, int peak) {
  const auto n = static_cast<int>(x.size());
  // Lowest contour: the higher of the two valley minima between this peak
  // and the nearest strictly-higher samples (or the series ends).
  double left_min = x[peak];
  for (int j = peak - 1; j >= 0; --j) {
    if (x[j] > x[peak]) break;
    left_min = std::min(left_min, x[j]);
  }
  double right_min = x[peak];
  for (int j = peak + 1; j < n; ++j) {
    if (x[j] > x[peak]) break;
    right_min = std::min(right_min, x[j]);
  }
  return x[peak] - std::max(left_min, right_min);
}

}  // namespace

std::vector<double> detect_peaks(const Series& series, double sample_rate_hz,
                                 double min_distance_s,
                                 double min_prominence) {
  if (series.size() < 3) return {};
  const int min_gap =
      std::max(1, static_cast<int>(std::lround(min_distance_s * sample_rate_hz)));

  std::vector<Candidate> cands;
  for (int idx : local_maxima(series)) {
    const double prom = peak_prominence(series, idx);
    if (prom >= min_prominence) {
      cands.push_back({idx, series[idx], prom});
    }
  }
  // Keep the tallest peak of every conflict neighborhood.
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.height != b.height) return a.height > b.height;
    return a.index < b.index;
  });
  std::vector<int> kept;
  for (const Candidate& c : cands) {
    bool clear = true;
    for (int k : kept) {
      if (std::abs(k - c.index) < min_gap) {
        clear = false;
        break;
      }
    }
    if (clear) kept.push_back(c.index);
  }
  std::sort(kept.begin(), kept.end());

  std::vector<double> times;
  times.reserve(kept.size());
  for (int idx : kept) times.push_back(idx / sample_rate_hz);
  return times;
}

std::optional<double> rate_from_peaks(const std::vector<double>& peak_times_s) {
  if (peak_times_s.size() < 2) return std::nullopt;
  const double span = peak_times_s.back() - peak_times_s.front();
  if (!(span > 0.0)) return std::nullopt;
  return 60.0 * static_cast<double>(peak_times_s.size() - 1) / span;
}

const char* to_string(Modality m) {
  return m == Modality::amplitude ? "amplitude" : "phase";
}

SpectralReport spectral_concentration(const Series& series,
                                      const BandConfig& band, Modality m) {
  validate(band);
  const auto min_len =
      static_cast<Eigen::Index>(std::ceil(band.sample_rate_hz / band.low_hz));
  if (series.size() < min_len) {
    throw InsufficientDataError(
        "spectral concentration needs at least " + std::to_string(min_len) +
        " samples, got " + std::to_string(series.size()));
  }
  const dsp::Spectrum spec =
      dsp::magnitude_spectrum(series, band.sample_rate_hz, 4);

  const auto lo_bin = static_cast<Eigen::Index>(
      std::ceil(band.low_hz / spec.bin_hz - 1e-9));
  const auto hi_bin = static_cast<Eigen::Index>(
      std::floor(band.high_hz / spec.bin_hz + 1e-9));
  if (hi_bin < lo_bin || hi_bin >= spec.magnitude.size()) {
    throw InsufficientDataError("band resolves to no FFT bins; window too short");
  }

  Eigen::Index star = lo_bin;
  double star_mag = spec.magnitude[lo_bin];
  double band_sum = 0.0;
  for (Eigen::Index b = lo_bin; b <= hi_bin; ++b) {
    band_sum += spec.magnitude[b];
    if (spec.magnitude[b] > star_mag) {
      star_mag = spec.magnitude[b];
      star = b;
    }
  }
  SpectralReport report;
  report.modality = m;
  report.f_star_hz = static_cast<double>(star) * spec.bin_hz;
  report.q_spec = band_sum > 0.0 ? star_mag / band_sum : 0.0;
  return report;
}

FilteredSignals filtered_signals(const FeatureTensors& features,
                                 SubcarrierChoice choice,
                                 const BandConfig& band) {
  if (choice.antenna < 0 || choice.antenna >= features.antenna_count() ||
      choice.subcarrier < 0 ||
      choice.subcarrier >= features.subcarrier_count()) {
    throw ValidationError("subcarrier choice out of range");
  }
  FilteredSignals out;
  out.source = choice;
  const Series amp = features.amplitude[choice.antenna]
                         .row(choice.subcarrier)
                         .transpose()
                         .array();
  const Series ph = features.phase[choice.antenna]
                        .row(choice.subcarrier)
                        .transpose()
                        .array();
  out.x_a = bandpass(amp, band);
  out.x_p = bandpass(ph, band);
  return out;
}

namespace {

/// Amplitude tensors for every (i,k) but phase for a single series; the
/// estimator only ever needs the phase of the selected subcarrier.
Series unwrapped_phase_series(const NormalizedCsi& norm, SubcarrierChoice c) {
  const CMatrix& m = norm.antennas[c.antenna];
  Series angles(m.cols());
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    angles[t] = std::arg(m(c.subcarrier, t));
  }
  return unwrap_phase(angles);
}

}  // namespace

RespirationEstimate estimate_respiration(const CsiRecording& rec,
                                         WindowSec window,
                                         const BandConfig& band) {
  validate(band);
  const double dt = rec.frame_interval;
  const auto begin_frame = static_cast<int>(std::lround(window.begin_s / dt));
  const auto end_frame = static_cast<int>(std::lround(window.end_s / dt));
  if (begin_frame < 0 || end_frame > rec.frame_count() ||
      begin_frame >= end_frame) {
    throw ValidationError("window outside recording");
  }
  if ((end_frame - begin_frame) * dt < kMinEstimationWindowS) {
    throw InsufficientDataError(
        "estimation window must be at least " +
        std::to_string(kMinEstimationWindowS) + " s");
  }

  CsiRecording cropped;
  cropped.frame_interval = rec.frame_interval;
  cropped.carrier_hz = rec.carrier_hz;
  cropped.antennas.reserve(rec.antennas.size());
  for (const CMatrix& m : rec.antennas) {
    cropped.antennas.push_back(m.middleCols(begin_frame, end_frame - begin_frame));
  }

  const SubcarrierMask mask = usable_subcarriers(cropped, 0);
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw ValidationError("no usable subcarrier: all are masked");
  }
  const NormalizedCsi norm = normalize_antenna_ratio(cropped, 0, mask);

  // Amplitude features for all series; phase only where needed.
  FeatureTensors features;
  features.frame_interval = norm.frame_interval;
  features.amplitude.reserve(norm.antennas.size());
  for (const CMatrix& m : norm.antennas) {
    features.amplitude.emplace_back(
        (m.array().real().square() + m.array().imag().square()).sqrt());
  }

  const SubcarrierChoice choice = [&] {
    FeatureTensors amp_only;
    amp_only.frame_interval = features.frame_interval;
    amp_only.amplitude = features.amplitude;
    return select_subcarrier(amp_only, band, mask);
  }();

  const Series amp_series = features.amplitude[choice.antenna]
                                .row(choice.subcarrier)
                                .transpose()
                                .array();
  const Series phase_series = unwrapped_phase_series(norm, choice);

  const Series x_a = bandpass(amp_series, band);
  const Series x_p = bandpass(phase_series, band);

  RespirationEstimate est;
  est.window = window;
  est.source = choice;
  est.amplitude_report =
      spectral_concentration(x_a, band, Modality::amplitude);
  est.phase_report = spectral_concentration(x_p, band, Modality::phase);
  // Amplitude wins ties: it is the more impairment-tolerant modality.
  est.chosen_modality =
      est.phase_report.q_spec > est.amplitude_report.q_spec
          ? Modality::phase
          : Modality::amplitude;

  const Series& chosen =
      est.chosen_modality == Modality::amplitude ? x_a : x_p;
  const double fs = band.sample_rate_hz;
  const double std_dev =
      std::sqrt((chosen - chosen.mean()).square().mean());
  const std::vector<double> peaks =
      detect_peaks(chosen, fs, 1.0 / band.high_hz, 0.25 * std_dev);
  est.peak_times_s.reserve(peaks.size());
  for (double p : peaks) est.peak_times_s.push_back(window.begin_s + p);

  const SpectralReport& chosen_report =
      est.chosen_modality == Modality::amplitude ? est.amplitude_report
                                                 : est.phase_report;
  const auto peak_rate = rate_from_peaks(est.peak_times_s);
  double rate = peak_rate ? *peak_rate : 60.0 * chosen_report.f_star_hz;
  rate = std::clamp(rate, 60.0 * band.low_hz, 60.0 * band.high_hz);
  est.rate_bpm = rate;
  return est;
}

nlohmann::json estimate_to_json(const RespirationEstimate& est) {
  return nlohmann::json{
      {"rate_bpm", est.rate_bpm},
      {"chosen_modality", to_string(est.chosen_modality)},
      {"q_amplitude", est.amplitude_report.q_spec},
      {"q_phase", est.phase_report.q_spec},
      {"f_star_amplitude_hz", est.amplitude_report.f_star_hz},
      {"f_star_phase_hz", est.phase_report.f_star_hz},
      {"window_s", {est.window.begin_s, est.window.end_s}},
      {"subcarrier", est.source.subcarrier},
      {"antenna", est.source.antenna},
  };
}

}  // namespace srs_sense
