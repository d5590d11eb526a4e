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

#include "srs_sense/sim.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "srs_sense/rng.hpp"

namespace srs_sense {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kSubcarrierSpacingHz = 30e3;  // n78 numerology
constexpr int kStaticPaths = 6;
constexpr double kMaxPathDelayS = 300e-9;
constexpr double kRespPathRelAmplitude = 0.31622776601683794;  // -10 dB
constexpr double kMovementAr1Rho = 0.9;
constexpr double kInterfererEdgeRampS = 0.5;

// Stream tags for splitting one seed into independent generators.
constexpr std::uint64_t kChannelTag = 0x4348414Eull;   // "CHAN"
constexpr std::uint64_t kNoiseTag = 0x4E4F4953ull;     // "NOIS"
constexpr std::uint64_t kOffsetTag = 0x4F464653ull;    // "OFFS"
constexpr std::uint64_t kMovementTag = 0x4D4F5645ull;  // "MOVE"
constexpr std::uint64_t kInterfTag = 0x494E5446ull;    // "INTF"

double interferer_gain_multiplier(Proximity p) {
  switch (p) {
    case Proximity::near_ue: return 10.0;
    case Proximity::indoor_far: return 0.3;
    case Proximity::outdoor: return 0.05;
  }
  return 0.0;
}

/// e^{-j 2 pi spacing delay k} for k = 0..count-1, via phasor recurrence.
Eigen::VectorXcd delay_ramp(double delay_s, int count) {
  Eigen::VectorXcd ramp(count);
  const Complex step = std::polar(1.0, -2.0 * M_PI * kSubcarrierSpacingHz * delay_s);
  Complex cur{1.0, 0.0};
  for (int k = 0; k < count; ++k) {
    ramp[k] = cur;
    cur *= step;
  }
  return ramp;
}

double rms_of(const CsiRecording& rec) {
  double acc = 0.0;
  double count = 0.0;
  for (const CMatrix& m : rec.antennas) {
    acc += m.squaredNorm();
    count += static_cast<double>(m.size());
  }
  return std::sqrt(acc / count);
}

void inject_movement_inplace(CsiRecording& rec, const MovementSpec& spec,
                             std::uint64_t seed, double amplitude_scale) {
  const MovementSignature& sig = signature_of(spec.movement_class);
  const double duration =
      spec.duration_s > 0.0 ? spec.duration_s : sig.duration_s;
  if (spec.intensity == 0.0) return;

  const double dt = rec.frame_interval;
  const int k_count = rec.subcarrier_count();
  const int t0 = static_cast<int>(std::lround(spec.start_s / dt));
  const int t1 = std::min(
      rec.frame_count(),
      static_cast<int>(std::lround((spec.start_s + duration) / dt)));
  if (t0 >= t1) return;

  rng::Xoshiro256pp gen(seed);

  // Contiguous subcarrier support block, wrap-around.
  const int support =
      std::max(1, static_cast<int>(std::lround(sig.subcarrier_support * k_count)));
  const int block_start = static_cast<int>(gen.bounded(static_cast<std::uint64_t>(k_count)));
  std::vector<bool> hit(static_cast<std::size_t>(k_count), false);
  for (int off = 0; off < support; ++off) {
    hit[static_cast<std::size_t>((block_start + off) % k_count)] = true;
  }

  const double amp = spec.intensity * sig.rel_amplitude * amplitude_scale;
  const double innov = std::sqrt(1.0 - kMovementAr1Rho * kMovementAr1Rho);
  const int frames = t1 - t0;

  // AR(1) fluctuation per (antenna, subcarrier); one state vector per antenna.
  std::vector<Eigen::VectorXcd> state(static_cast<std::size_t>(rec.antenna_count()));
  for (auto& s : state) {
    s.resize(k_count);
    for (int k = 0; k < k_count; ++k) s[k] = gen.complex_normal();
  }

  for (int t = t0; t < t1; ++t) {
    const double u = (t - t0 + 0.5) / frames;  // position in the burst, (0,1)
    double env;
    if (sig.sustained) {
      const double ramp_frac = std::min(0.3 / duration, 0.5);
      if (u < ramp_frac) {
        env = 0.5 * (1.0 - std::cos(M_PI * u / ramp_frac));
      } else if (u > 1.0 - ramp_frac) {
        env = 0.5 * (1.0 - std::cos(M_PI * (1.0 - u) / ramp_frac));
      } else {
        env = 1.0;
      }
    } else {
      env = 0.5 * (1.0 - std::cos(2.0 * M_PI * u));  // single hump
    }
    for (int i = 0; i < rec.antenna_count(); ++i) {
      Eigen::VectorXcd& s = state[static_cast<std::size_t>(i)];
      CMatrix& m = rec.antennas[static_cast<std::size_t>(i)];
      for (int k = 0; k < k_count; ++k) {
        s[k] = kMovementAr1Rho * s[k] + innov * gen.complex_normal();
        if (hit[static_cast<std::size_t>(k)]) {
          m(k, t) += amp * env * s[k];
        }
      }
    }
  }
}

void inject_interferer_inplace(CsiRecording& rec, const InterfererSpec& spec,
                               std::uint64_t seed, double amplitude_scale) {
  if (spec.motion_amplitude == 0.0) return;
  const double dt = rec.frame_interval;
  const int t0 = std::max(0, static_cast<int>(std::lround(spec.active_begin_s / dt)));
  const int t1 = std::min(rec.frame_count(),
                          static_cast<int>(std::lround(spec.active_end_s / dt)));
  if (t0 >= t1) return;

  rng::Xoshiro256pp gen(seed);

  // A small set of incommensurate tones straddling the respiration band:
  // a moving person produces several competing spectral lines, not one.
  constexpr int kTones = 3;
  double freq[kTones], amp[kTones], phase[kTones];
  double power = 0.0;
  for (int q = 0; q < kTones; ++q) {
    freq[q] = gen.uniform(0.08, 0.8);
    amp[q] = gen.uniform(0.5, 1.0);
    phase[q] = gen.uniform(-M_PI, M_PI);
    power += amp[q] * amp[q];
  }
  const double norm = 1.0 / std::sqrt(power);
  for (double& a : amp) a *= norm;

  const double delay = gen.uniform(0.0, kMaxPathDelayS);
  const Eigen::VectorXcd ramp = delay_ramp(delay, rec.subcarrier_count());
  std::vector<Complex> direction(static_cast<std::size_t>(rec.antenna_count()));
  for (auto& d : direction) d = gen.unit_phasor();

  const double gain = interferer_gain_multiplier(spec.proximity) *
                      kRespPathRelAmplitude * amplitude_scale *
                      spec.motion_amplitude;
  const double ramp_frames = kInterfererEdgeRampS / dt;

  for (int t = t0; t < t1; ++t) {
    const double time = t * dt;
    Complex u{0.0, 0.0};
    for (int q = 0; q < kTones; ++q) {
      u += amp[q] * std::polar(1.0, 2.0 * M_PI * freq[q] * time + phase[q]);
    }
    double env = 1.0;
    const double from_start = (t - t0 + 1) / ramp_frames;
    const double to_end = (t1 - t) / ramp_frames;
    if (from_start < 1.0) env = std::min(env, 0.5 * (1.0 - std::cos(M_PI * from_start)));
    if (to_end < 1.0) env = std::min(env, 0.5 * (1.0 - std::cos(M_PI * to_end)));

    const Complex common = gain * env * u;
    for (int i = 0; i < rec.antenna_count(); ++i) {
      rec.antennas[static_cast<std::size_t>(i)].col(t) +=
          (common * direction[static_cast<std::size_t>(i)]) * ramp;
    }
  }
}

void apply_offsets_inplace(CsiRecording& rec, const OffsetConfig& offsets,
                           std::uint64_t seed) {
  if (!offsets.any()) return;
  rng::Xoshiro256pp gen(seed);
  const double dt = rec.frame_interval;
  const int k_count = rec.subcarrier_count();
  Eigen::VectorXcd sto(k_count);
  for (int t = 0; t < rec.frame_count(); ++t) {
    double theta = 0.0;
    if (offsets.per_frame_phase) theta = gen.uniform(-M_PI, M_PI);
    theta += 2.0 * M_PI * offsets.cfo_hz * t * dt;
    const Complex phasor = std::polar(1.0, theta);

    const bool with_sto = offsets.sto_slope_rad_per_subcarrier != 0.0;
    if (with_sto) {
      const double ramp_t = gen.uniform(-1.0, 1.0);
      const Complex step =
          std::polar(1.0, offsets.sto_slope_rad_per_subcarrier * ramp_t);
      Complex cur = phasor;
      for (int k = 0; k < k_count; ++k) {
        sto[k] = cur;
        cur *= step;
      }
      for (auto& m : rec.antennas) {
        m.col(t) = m.col(t).cwiseProduct(sto);
      }
    } else {
      for (auto& m : rec.antennas) m.col(t) *= phasor;
    }
  }
}

}  // namespace

const MovementSignature& signature_of(MovementClass c) {
  static const MovementSignature kBodyTurn{2.0, 1.0, 1.0, false};
  static const MovementSignature kSittingUp{3.0, 0.9, 1.0, true};
  static const MovementSignature kArmMove{1.0, 0.5, 0.6, false};
  static const MovementSignature kLegMove{1.0, 0.35, 0.4, false};
  switch (c) {
    case MovementClass::body_turn: return kBodyTurn;
    case MovementClass::sitting_up: return kSittingUp;
    case MovementClass::arm_move: return kArmMove;
    case MovementClass::leg_move: return kLegMove;
  }
  return kBodyTurn;
}

const char* to_string(MovementClass c) {
  switch (c) {
    case MovementClass::body_turn: return "body_turn";
    case MovementClass::sitting_up: return "sitting_up";
    case MovementClass::arm_move: return "arm_move";
    case MovementClass::leg_move: return "leg_move";
  }
  return "?";
}

const char* to_string(Proximity p) {
  switch (p) {
    case Proximity::near_ue: return "near_ue";
    case Proximity::indoor_far: return "indoor_far";
    case Proximity::outdoor: return "outdoor";
  }
  return "?";
}

MovementClass movement_class_from_string(const std::string& s) {
  if (s == "body_turn") return MovementClass::body_turn;
  if (s == "sitting_up") return MovementClass::sitting_up;
  if (s == "arm_move") return MovementClass::arm_move;
  if (s == "leg_move") return MovementClass::leg_move;
  throw ValidationError("unknown movement class '" + s + "'");
}

Proximity proximity_from_string(const std::string& s) {
  if (s == "near_ue") return Proximity::near_ue;
  if (s == "indoor_far") return Proximity::indoor_far;
  if (s == "outdoor") return Proximity::outdoor;
  throw ValidationError("unknown proximity '" + s + "'");
}

int SimulationConfig::frame_count() const {
  return static_cast<int>(std::llround(duration_s / frame_interval));
}

void validate(const SimulationConfig& config) {
  if (config.antenna_count < 2 || config.antenna_count > 0xFFFF) {
    throw ValidationError("antenna_count must be in [2, 65535], got " +
                          std::to_string(config.antenna_count));
  }
  if (config.subcarrier_count < 1) {
    throw ValidationError("subcarrier_count must be >= 1");
  }
  if (!(config.frame_interval > 0.0)) {
    throw ValidationError("frame_interval must be > 0");
  }
  if (config.frame_count() < 2) {
    throw ValidationError("duration: duration/frame_interval must yield >= 2 frames");
  }
  if (!(config.carrier_hz > 0.0)) {
    throw ValidationError("carrier_hz must be > 0");
  }
  if (config.respiration.enabled) {
    if (!(config.respiration.rate_hz >= 0.05 && config.respiration.rate_hz <= 1.0)) {
      throw ValidationError("respiration.rate_hz must be within [0.05, 1.0]");
    }
    if (config.respiration.chest_displacement < 0.0) {
      throw ValidationError("respiration.chest_displacement must be >= 0");
    }
  }
  if (!std::isfinite(config.noise_snr_db)) {
    throw ValidationError("noise_snr_db must be finite");
  }
  for (std::size_t n = 0; n < config.interferers.size(); ++n) {
    const InterfererSpec& spec = config.interferers[n];
    const std::string field = "interferers[" + std::to_string(n) + "]";
    if (spec.motion_amplitude < 0.0) {
      throw ValidationError(field + ".motion_amplitude must be >= 0");
    }
    if (!(spec.active_begin_s >= 0.0) ||
        !(spec.active_end_s > spec.active_begin_s) ||
        spec.active_end_s > config.duration_s + 1e-9) {
      throw ValidationError(field + ".active_interval must lie within the recording");
    }
  }
  std::vector<std::pair<double, double>> spans;
  for (std::size_t n = 0; n < config.movements.size(); ++n) {
    const MovementSpec& spec = config.movements[n];
    const std::string field = "movements[" + std::to_string(n) + "]";
    const double duration = spec.duration_s > 0.0
                                ? spec.duration_s
                                : signature_of(spec.movement_class).duration_s;
    if (spec.duration_s < 0.0) {
      throw ValidationError(field + ".duration must be > 0");
    }
    if (spec.intensity < 0.0) {
      throw ValidationError(field + ".intensity must be >= 0");
    }
    if (!(spec.start_s >= 0.0) ||
        spec.start_s + duration > config.duration_s + 1e-9) {
      throw ValidationError(field + ".start: event must lie within the recording");
    }
    spans.emplace_back(spec.start_s, spec.start_s + duration);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t n = 1; n < spans.size(); ++n) {
    if (spans[n].first < spans[n - 1].second) {
      throw ValidationError("movements: event intervals overlap");
    }
  }
}

std::pair<CsiRecording, GroundTruth> simulate(const SimulationConfig& config) {
  validate(config);
  const int frames = config.frame_count();
  const int k_count = config.subcarrier_count;
  const int antennas = config.antenna_count;
  const double dt = config.frame_interval;
  const double lambda = kSpeedOfLight / config.carrier_hz;

  rng::Xoshiro256pp channel(rng::derive_stream(config.seed, kChannelTag));

  double path_delays[kStaticPaths];
  for (double& d : path_delays) d = channel.uniform(0.0, kMaxPathDelayS);
  const double resp_delay = channel.uniform(0.0, kMaxPathDelayS);

  std::vector<Eigen::VectorXcd> static_gain;
  std::vector<Complex> resp_direction(static_cast<std::size_t>(antennas));
  static_gain.reserve(static_cast<std::size_t>(antennas));
  const double per_path_sigma = std::sqrt(1.0 / kStaticPaths);
  std::vector<Eigen::VectorXcd> ramps;
  ramps.reserve(kStaticPaths);
  for (double d : path_delays) ramps.push_back(delay_ramp(d, k_count));
  const Eigen::VectorXcd resp_ramp = delay_ramp(resp_delay, k_count);

  for (int i = 0; i < antennas; ++i) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(k_count);
    for (int p = 0; p < kStaticPaths; ++p) {
      const Complex path_gain = per_path_sigma * channel.complex_normal();
      g += path_gain * ramps[static_cast<std::size_t>(p)];
    }
    static_gain.push_back(std::move(g));
    resp_direction[static_cast<std::size_t>(i)] = channel.unit_phasor();
  }

  double static_power = 0.0;
  for (const auto& g : static_gain) static_power += g.squaredNorm();
  static_power /= static_cast<double>(antennas) * k_count;
  const double static_rms = std::sqrt(static_power);
  const double resp_amp = kRespPathRelAmplitude * static_rms;

  CsiRecording rec;
  rec.frame_interval = dt;
  rec.carrier_hz = config.carrier_hz;
  rec.antennas.assign(static_cast<std::size_t>(antennas),
                      CMatrix(k_count, frames));

  // Base channel: static paths plus the chest-modulated path. The chest
  // displacement d(t) shifts the path length, so the path phase swings by
  // 2 pi d(t) / lambda.
  for (int t = 0; t < frames; ++t) {
    Complex resp_phasor{0.0, 0.0};
    if (config.respiration.enabled) {
      const double displacement =
          config.respiration.chest_displacement *
          std::sin(2.0 * M_PI * config.respiration.rate_hz * t * dt);
      resp_phasor = resp_amp * std::polar(1.0, 2.0 * M_PI * displacement / lambda);
    }
    for (int i = 0; i < antennas; ++i) {
      auto col = rec.antennas[static_cast<std::size_t>(i)].col(t);
      col = static_gain[static_cast<std::size_t>(i)];
      if (config.respiration.enabled) {
        col += (resp_phasor * resp_direction[static_cast<std::size_t>(i)]) *
               resp_ramp;
      }
    }
  }

  for (std::size_t n = 0; n < config.movements.size(); ++n) {
    inject_movement_inplace(rec, config.movements[n],
                            rng::derive_stream(config.seed, kMovementTag + n),
                            static_rms);
  }
  for (std::size_t n = 0; n < config.interferers.size(); ++n) {
    inject_interferer_inplace(rec, config.interferers[n],
                              rng::derive_stream(config.seed, kInterfTag + n),
                              static_rms);
  }

  if (config.noise_snr_db < kNoiselessSnrDb) {
    rng::Xoshiro256pp noise(rng::derive_stream(config.seed, kNoiseTag));
    const double sigma =
        static_rms * std::pow(10.0, -config.noise_snr_db / 20.0);
    for (auto& m : rec.antennas) {
      for (int t = 0; t < frames; ++t) {
        auto col = m.col(t);
        for (int k = 0; k < k_count; ++k) {
          col[k] += sigma * noise.complex_normal();
        }
      }
    }
  }

  apply_offsets_inplace(rec, config.offsets,
                        rng::derive_stream(config.seed, kOffsetTag));

  GroundTruth truth;
  truth.seed = config.seed;
  truth.respiration_rate_bpm =
      config.respiration.enabled ? 60.0 * config.respiration.rate_hz : 0.0;
  for (const MovementSpec& spec : config.movements) {
    const double duration = spec.duration_s > 0.0
                                ? spec.duration_s
                                : signature_of(spec.movement_class).duration_s;
    truth.movement_events.push_back(
        {spec.start_s, spec.start_s + duration, spec.movement_class});
  }
  std::sort(truth.movement_events.begin(), truth.movement_events.end(),
            [](const TruthEvent& a, const TruthEvent& b) {
              return a.begin_s < b.begin_s;
            });
  for (const InterfererSpec& spec : config.interferers) {
    truth.interferer_intervals.push_back(
        {spec.active_begin_s, spec.active_end_s, spec.proximity});
  }
  return {std::move(rec), std::move(truth)};
}

CsiRecording apply_frame_offsets(const CsiRecording& rec,
                                 const OffsetConfig& offsets,
                                 std::uint64_t seed) {
  CsiRecording out = rec;
  apply_offsets_inplace(out, offsets, seed);
  return out;
}

CsiRecording inject_movement(const CsiRecording& rec, const MovementSpec& spec,
                             std::uint64_t seed) {
  const double duration = spec.duration_s > 0.0
                              ? spec.duration_s
                              : signature_of(spec.movement_class).duration_s;
  if (!(spec.start_s >= 0.0) ||
      spec.start_s + duration > rec.duration() + 1e-9) {
    throw ValidationError("movement start: event must lie within the recording");
  }
  if (spec.intensity < 0.0) {
    throw ValidationError("movement intensity must be >= 0");
  }
  CsiRecording out = rec;
  inject_movement_inplace(out, spec, seed, rms_of(rec));
  return out;
}

CsiRecording inject_interferer(const CsiRecording& rec,
                               const InterfererSpec& spec,
                               std::uint64_t seed) {
  if (spec.motion_amplitude < 0.0) {
    throw ValidationError("interferer motion_amplitude must be >= 0");
  }
  if (!(spec.active_end_s > spec.active_begin_s)) {
    throw ValidationError("interferer active_interval must be non-empty");
  }
  CsiRecording out = rec;
  inject_interferer_inplace(out, spec, seed, rms_of(rec));
  return out;
}

// --- JSON ---

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& scope) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ValidationError("unknown config field '" + scope + item.key() + "'");
    }
  }
}

}  // namespace

SimulationConfig config_from_json(const nlohmann::json& j,
                                  bool* seed_present) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"antenna_count", "subcarrier_count", "frame_interval",
                       "duration", "carrier_hz", "respiration", "offsets",
                       "noise_snr_db", "interferers", "movements", "seed"},
                      "");
  SimulationConfig c;
  try {
    c.antenna_count = j.value("antenna_count", c.antenna_count);
    c.subcarrier_count = j.value("subcarrier_count", c.subcarrier_count);
    c.frame_interval = j.value("frame_interval", c.frame_interval);
    c.duration_s = j.value("duration", c.duration_s);
    c.carrier_hz = j.value("carrier_hz", c.carrier_hz);
    c.noise_snr_db = j.value("noise_snr_db", c.noise_snr_db);
    if (j.contains("respiration")) {
      const auto& r = j.at("respiration");
      reject_unknown_keys(r, {"enabled", "rate_hz", "chest_displacement"},
                          "respiration.");
      c.respiration.enabled = r.value("enabled", c.respiration.enabled);
      c.respiration.rate_hz = r.value("rate_hz", c.respiration.rate_hz);
      c.respiration.chest_displacement =
          r.value("chest_displacement", c.respiration.chest_displacement);
    }
    if (j.contains("offsets")) {
      const auto& o = j.at("offsets");
      reject_unknown_keys(
          o, {"per_frame_phase", "cfo_hz", "sto_slope_rad_per_subcarrier"},
          "offsets.");
      c.offsets.per_frame_phase =
          o.value("per_frame_phase", c.offsets.per_frame_phase);
      c.offsets.cfo_hz = o.value("cfo_hz", c.offsets.cfo_hz);
      c.offsets.sto_slope_rad_per_subcarrier = o.value(
          "sto_slope_rad_per_subcarrier", c.offsets.sto_slope_rad_per_subcarrier);
    }
    if (j.contains("interferers")) {
      for (const auto& e : j.at("interferers")) {
        reject_unknown_keys(e, {"proximity", "motion_amplitude", "active_interval"},
                            "interferers.");
        InterfererSpec spec;
        spec.proximity = proximity_from_string(e.at("proximity").get<std::string>());
        spec.motion_amplitude = e.value("motion_amplitude", spec.motion_amplitude);
        const auto& iv = e.at("active_interval");
        spec.active_begin_s = iv.at(0).get<double>();
        spec.active_end_s = iv.at(1).get<double>();
        c.interferers.push_back(spec);
      }
    }
    if (j.contains("movements")) {
      for (const auto& e : j.at("movements")) {
        reject_unknown_keys(e, {"class", "start", "duration", "intensity"},
                            "movements.");
        MovementSpec spec;
        spec.movement_class =
            movement_class_from_string(e.at("class").get<std::string>());
        spec.start_s = e.at("start").get<double>();
        spec.duration_s = e.value("duration", 0.0);
        spec.intensity = e.value("intensity", spec.intensity);
        c.movements.push_back(spec);
      }
    }
    if (seed_present) *seed_present = j.contains("seed");
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return c;
}

nlohmann::json config_to_json(const SimulationConfig& c) {
  nlohmann::json j{
      {"antenna_count", c.antenna_count},
      {"subcarrier_count", c.subcarrier_count},
      {"frame_interval", c.frame_interval},
      {"duration", c.duration_s},
      {"carrier_hz", c.carrier_hz},
      {"respiration",
       {{"enabled", c.respiration.enabled},
        {"rate_hz", c.respiration.rate_hz},
        {"chest_displacement", c.respiration.chest_displacement}}},
      {"offsets",
       {{"per_frame_phase", c.offsets.per_frame_phase},
        {"cfo_hz", c.offsets.cfo_hz},
        {"sto_slope_rad_per_subcarrier", c.offsets.sto_slope_rad_per_subcarrier}}},
      {"noise_snr_db", c.noise_snr_db},
      {"interferers", nlohmann::json::array()},
      {"movements", nlohmann::json::array()},
      {"seed", c.seed},
  };
  for (const InterfererSpec& s : c.interferers) {
    j["interferers"].push_back(
        {{"proximity", to_string(s.proximity)},
         {"motion_amplitude", s.motion_amplitude},
         {"active_interval", {s.active_begin_s, s.active_end_s}}});
  }
  for (const MovementSpec& s : c.movements) {
    j["movements"].push_back({{"class", to_string(s.movement_class)},
                              {"start", s.start_s},
                              {"duration",
                               s.duration_s > 0.0
                                   ? s.duration_s
                                   : signature_of(s.movement_class).duration_s},
                              {"intensity", s.intensity}});
  }
  return j;
}

nlohmann::json truth_to_json(const GroundTruth& truth) {
  nlohmann::json events = nlohmann::json::array();
  for (const TruthEvent& e : truth.movement_events) {
    events.push_back({{"interval", {e.begin_s, e.end_s}},
                      {"class", to_string(e.movement_class)}});
  }
  nlohmann::json interferers = nlohmann::json::array();
  for (const TruthInterference& e : truth.interferer_intervals) {
    interferers.push_back({{"interval", {e.begin_s, e.end_s}},
                           {"proximity", to_string(e.proximity)}});
  }
  return nlohmann::json{
      {"respiration_rate_bpm", truth.respiration_rate_bpm},
      {"movement_events", events},
      {"interferer_intervals", interferers},
      {"seed", truth.seed},
      {"generator", rng::kGeneratorId},
  };
}

GroundTruth truth_from_json(const nlohmann::json& j) {
  GroundTruth truth;
  try {
    truth.respiration_rate_bpm = j.at("respiration_rate_bpm").get<double>();
    truth.seed = j.value("seed", std::uint64_t{0});
    for (const auto& e : j.value("movement_events", nlohmann::json::array())) {
      TruthEvent ev;
      ev.begin_s = e.at("interval").at(0).get<double>();
      ev.end_s = e.at("interval").at(1).get<double>();
      ev.movement_class =
          movement_class_from_string(e.at("class").get<std::string>());
      truth.movement_events.push_back(ev);
    }
    for (const auto& e :
         j.value("interferer_intervals", nlohmann::json::array())) {
      TruthInterference iv;
      iv.begin_s = e.at("interval").at(0).get<double>();
      iv.end_s = e.at("interval").at(1).get<double>();
      iv.proximity = proximity_from_string(e.at("proximity").get<std::string>());
      truth.interferer_intervals.push_back(iv);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("truth parse error: ") + e.what());
  }
  return truth;
}

}  // namespace srs_sense
