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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srs_sense/csi.hpp"

namespace srs_sense {

enum class MovementClass { body_turn, sitting_up, arm_move, leg_move };
enum class Proximity { near_ue, indoor_far, outdoor };

const char* to_string(MovementClass c);
const char* to_string(Proximity p);
MovementClass movement_class_from_string(const std::string& s);
Proximity proximity_from_string(const std::string& s);

/// Per-class burst signature: canonical duration, disturbance amplitude
/// relative to the static-channel RMS, and the fraction of subcarriers hit.
struct MovementSignature {
  double duration_s;
  double rel_amplitude;
  double subcarrier_support;
  bool sustained;  // flat envelope instead of a single hump
};

const MovementSignature& signature_of(MovementClass c);

struct RespirationConfig {
  bool enabled = true;
  double rate_hz = 0.25;
  double chest_displacement = 0.005;  // meters, peak
};

struct OffsetConfig {
  bool per_frame_phase = false;
  double cfo_hz = 0.0;
  double sto_slope_rad_per_subcarrier = 0.0;

  bool any() const {
    return per_frame_phase || cfo_hz != 0.0 ||
           sto_slope_rad_per_subcarrier != 0.0;
  }
};

struct InterfererSpec {
  Proximity proximity = Proximity::outdoor;
  double motion_amplitude = 1.0;
  double active_begin_s = 0.0;
  double active_end_s = 0.0;
};

struct MovementSpec {
  MovementClass movement_class = MovementClass::body_turn;
  double start_s = 0.0;
  double duration_s = 0.0;  // 0 selects the class-canonical duration
  double intensity = 1.0;
};

/// noise_snr_db at or above this value disables noise entirely, so exactly
/// frame-constant recordings can be generated.
inline constexpr double kNoiselessSnrDb = 200.0;

struct SimulationConfig {
  int antenna_count = 4;
  int subcarrier_count = 800;
  double frame_interval = 0.020;
  double duration_s = 60.0;
  double carrier_hz = 3.5e9;
  RespirationConfig respiration;
  OffsetConfig offsets;
  double noise_snr_db = 20.0;
  std::vector<InterfererSpec> interferers;
  std::vector<MovementSpec> movements;
  std::uint64_t seed = 0;

  int frame_count() const;
};

void validate(const SimulationConfig& config);

struct TruthEvent {
  double begin_s = 0.0;
  double end_s = 0.0;
  MovementClass movement_class = MovementClass::body_turn;
};

struct TruthInterference {
  double begin_s = 0.0;
  double end_s = 0.0;
  Proximity proximity = Proximity::outdoor;
};

struct GroundTruth {
  double respiration_rate_bpm = 0.0;
  std::vector<TruthEvent> movement_events;
  std::vector<TruthInterference> interferer_intervals;
  std::uint64_t seed = 0;
};

/// Deterministic synthetic bistatic recording: 6 static Rayleigh paths plus a
/// chest-modulated path at -10 dB per (antenna, subcarrier), movement bursts,
/// proximity-scaled interferers, complex Gaussian noise, and per-frame
/// transceiver offsets common to all antennas. Identical (config, seed) gives
/// bit-identical output.
std::pair<CsiRecording, GroundTruth> simulate(const SimulationConfig& config);

/// Multiplies each frame by a common phasor e^{j(theta_t + 2 pi cfo t dt)}
/// and each subcarrier by e^{j slope k ramp_t}. All terms are shared across
/// antennas, so the antenna ratio is invariant to them.
CsiRecording apply_frame_offsets(const CsiRecording& rec,
                                 const OffsetConfig& offsets,
                                 std::uint64_t seed);

/// Adds a class-shaped wideband amplitude disturbance over the spec interval.
CsiRecording inject_movement(const CsiRecording& rec, const MovementSpec& spec,
                             std::uint64_t seed);

/// Adds a moving-scatterer path whose gain scales with proximity:
/// near_ue x10, indoor_far x0.3, outdoor x0.05 of the respiration-path gain.
CsiRecording inject_interferer(const CsiRecording& rec,
                               const InterfererSpec& spec, std::uint64_t seed);

// --- JSON wire formats (snake_case, field-for-field) ---

SimulationConfig config_from_json(const nlohmann::json& j,
                                  bool* seed_present = nullptr);
nlohmann::json config_to_json(const SimulationConfig& config);

nlohmann::json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& j);

}  // namespace srs_sense
