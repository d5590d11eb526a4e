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

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srs_sense/csi.hpp"
#include "srs_sense/resp.hpp"
#include "srs_sense/sim.hpp"

namespace srs_sense {

/// One real tensor slice per antenna, [subcarrier x frame].
using AmplitudeTensor = std::vector<RMatrix>;

AmplitudeTensor amplitude_of(const CsiRecording& rec);

struct ZScoreParams {
  double mu = 0.0;
  double sigma = 0.0;
  double epsilon = 1e-6;
};

/// (A - mu) / (sigma + epsilon) with the moments taken over the whole tensor.
std::pair<AmplitudeTensor, ZScoreParams> zscore(const AmplitudeTensor& amp,
                                                double epsilon = 1e-6);

/// S(t) = sum_{i,k} |A(i,k,t) - A(i,k,t-1)|; length frame_count - 1.
Series amplitude_delta(const AmplitudeTensor& amp);

/// Trailing moving average of S over window_w frames; the window shrinks at
/// the start so E(0) = S(0) and a constant S maps to itself.
Series short_term_energy(const Series& s, int window_w);

struct EnergyConfig {
  int window_w = 25;        // 0.5 s at the 20 ms cadence
  double threshold_k = 3.0;
  double min_event_s = 0.4;
  double merge_gap_s = 0.3;
};

struct MovementEvent {
  double begin_s = 0.0;
  double end_s = 0.0;
  double peak_energy = 0.0;
  double mean_energy = 0.0;
  std::optional<MovementClass> label;
};

/// Thresholds E at mu + k*sigma calibrated over a declared motion-free
/// baseline span (>= 5 s), merges nearby spans and drops slivers.
std::vector<MovementEvent> segment_events(const Series& energy,
                                          const EnergyConfig& config,
                                          WindowSec baseline,
                                          double frame_interval);

/// Fixed-geometry classifier input: antennas as channels, subcarriers
/// average-pooled to freq_bins, a time_steps-frame context centered on the
/// event (edge frames replicate past the recording boundary).
struct ClassifierSample {
  int channels = 0;
  int freq_bins = 0;
  int time_steps = 0;
  Eigen::VectorXf data;  // index (c*freq_bins + f)*time_steps + t
  std::optional<MovementClass> label;

  float at(int c, int f, int t) const {
    return data[(c * freq_bins + f) * time_steps + t];
  }
};

inline constexpr int kSampleFreqBins = 64;
inline constexpr int kSampleTimeSteps = 128;  // 2.56 s at 20 ms

ClassifierSample make_sample(const CsiRecording& rec,
                             const MovementEvent& event,
                             int freq_bins = kSampleFreqBins,
                             int time_steps = kSampleTimeSteps);

// --- Dataset on disk: one tensor file per sample plus a JSON manifest ---

struct DatasetEntry {
  std::string file;
  std::optional<MovementClass> label;
  std::string source_trace;
  double begin_s = 0.0;
  double end_s = 0.0;
  std::string location;  // optional grouping tag
  std::string split;     // optional: "train" / "test"
};

struct Dataset {
  std::vector<ClassifierSample> samples;
  std::vector<DatasetEntry> entries;
};

/// Sample tensor file: u16 channels, u16 freq_bins, u16 time_steps
/// (little-endian), then float32 payload in index order.
void write_sample_file(const std::filesystem::path& path,
                       const ClassifierSample& sample);
ClassifierSample read_sample_file(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                   const std::vector<std::string>& missed_truth = {},
                   const std::vector<std::string>& unmatched_detections = {});
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace srs_sense
