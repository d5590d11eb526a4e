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

#include "srs_sense/movement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

namespace srs_sense {

AmplitudeTensor amplitude_of(const CsiRecording& rec) {
  AmplitudeTensor amp;
  amp.reserve(rec.antennas.size());
  for (const CMatrix& m : rec.antennas) {
    amp.emplace_back(
        (m.array().real().square() + m.array().imag().square()).sqrt());
  }
  return amp;
}

std::pair<AmplitudeTensor, ZScoreParams> zscore(const AmplitudeTensor& amp,
                                                double epsilon) {
  if (amp.empty() || amp[0].size() == 0) {
    throw ValidationError("zscore input tensor is empty");
  }
  if (!(epsilon > 0.0)) throw ValidationError("zscore epsilon must be > 0");

  double sum = 0.0;
  double count = 0.0;
  for (const RMatrix& m : amp) {
    sum += m.sum();
    count += static_cast<double>(m.size());
  }
  const double mu = sum / count;
  double sq = 0.0;
  for (const RMatrix& m : amp) {
    sq += (m.array() - mu).square().sum();
  }
  const double sigma = std::sqrt(sq / count);

  ZScoreParams params{mu, sigma, epsilon};
  AmplitudeTensor out;
  out.reserve(amp.size());
  for (const RMatrix& m : amp) {
    out.emplace_back((m.array() - mu) / (sigma + epsilon));
  }
  return {std::move(out), params};
}

Series amplitude_delta(const AmplitudeTensor& amp) {
  if (amp.empty() || amp[0].cols() < 2) {
    throw ValidationError("amplitude_delta needs at least 2 frames");
  }
  const auto frames = amp[0].cols();
  Series s = Series::Zero(frames - 1);
  for (const RMatrix& m : amp) {
    for (Eigen::Index t = 1; t < frames; ++t) {
      s[t - 1] += (m.col(t) - m.col(t - 1)).cwiseAbs().sum();
    }
  }
  return s;
}

Series short_term_energy(const Series& s, int window_w) {
  if (window_w < 1) throw ValidationError("window_w must be >= 1");
  Series e(s.size());
  double acc = 0.0;
  for (Eigen::Index t = 0; t < s.size(); ++t) {
    acc += s[t];
    if (t >= window_w) acc -= s[t - window_w];
    const auto len = std::min<Eigen::Index>(t + 1, window_w);
    e[t] = acc / static_cast<double>(len);
  }
  return e;
}

std::vector<MovementEvent> segment_events(const Series& energy,
                                          const EnergyConfig& config,
                                          WindowSec baseline,
                                          double frame_interval) {
  if (config.window_w < 1 || !(config.threshold_k > 0.0)) {
    throw ValidationError("energy config: window_w >= 1 and threshold_k > 0 required");
  }
  if (baseline.length() < 5.0) {
    throw ValidationError("baseline interval must span at least 5 s for calibration");
  }
  const double dt = frame_interval;
  const auto n = static_cast<int>(energy.size());
  const int b0 = std::max(0, static_cast<int>(std::lround(baseline.begin_s / dt)));
  const int b1 = std::min(n, static_cast<int>(std::lround(baseline.end_s / dt)));
  if (b1 - b0 < 2) throw ValidationError("baseline interval outside the energy series");

  const auto base = energy.segment(b0, b1 - b0);
  const double mu = base.mean();
  const double sigma = std::sqrt((base - mu).square().mean());
  const double threshold = mu + config.threshold_k * sigma;

  // Maximal above-threshold spans as frame index ranges [first, last].
  struct Span {
    int first, last;
  };
  std::vector<Span> spans;
  int start = -1;
  for (int t = 0; t < n; ++t) {
    if (energy[t] > threshold) {
      if (start < 0) start = t;
    } else if (start >= 0) {
      spans.push_back({start, t - 1});
      start = -1;
    }
  }
  if (start >= 0) spans.push_back({start, n - 1});

  const int gap_frames =
      std::max(1, static_cast<int>(std::lround(config.merge_gap_s / dt)));
  std::vector<Span> merged;
  for (const Span& sp : spans) {
    if (!merged.empty() && sp.first - merged.back().last - 1 < gap_frames) {
      merged.back().last = sp.last;
    } else {
      merged.push_back(sp);
    }
  }

  std::vector<MovementEvent> events;
  for (const Span& sp : merged) {
    const double begin_s = sp.first * dt;
    const double end_s = (sp.last + 1) * dt;
    if (end_s - begin_s < config.min_event_s) continue;
    MovementEvent ev;
    ev.begin_s = begin_s;
    ev.end_s = end_s;
    ev.peak_energy = energy.segment(sp.first, sp.last - sp.first + 1).maxCoeff();
    ev.mean_energy = energy.segment(sp.first, sp.last - sp.first + 1).mean();
    events.push_back(ev);
  }
  return events;
}

ClassifierSample make_sample(const CsiRecording& rec,
                             const MovementEvent& event, int freq_bins,
                             int time_steps) {
  if (!(event.end_s > event.begin_s) || event.begin_s < 0.0 ||
      event.end_s > rec.duration() + 1e-9) {
    throw ValidationError("event interval outside recording");
  }
  const int antennas = rec.antenna_count();
  const int k_count = rec.subcarrier_count();
  const int frames = rec.frame_count();
  freq_bins = std::min(freq_bins, k_count);

  const auto [norm_amp, params] = zscore(amplitude_of(rec));
  (void)params;

  const double center_s = 0.5 * (event.begin_s + event.end_s);
  const int center = static_cast<int>(std::lround(center_s / rec.frame_interval));
  const int first = center - time_steps / 2;

  ClassifierSample sample;
  sample.channels = antennas;
  sample.freq_bins = freq_bins;
  sample.time_steps = time_steps;
  sample.label = event.label;
  sample.data.resize(antennas * freq_bins * time_steps);

  for (int i = 0; i < antennas; ++i) {
    const RMatrix& m = norm_amp[static_cast<std::size_t>(i)];
    for (int t = 0; t < time_steps; ++t) {
      const int src = std::clamp(first + t, 0, frames - 1);  // edge replication
      for (int f = 0; f < freq_bins; ++f) {
        // Contiguous block pooling; block sizes differ by at most one.
        const int k_begin = static_cast<int>(
            (static_cast<long>(f) * k_count) / freq_bins);
        const int k_end = static_cast<int>(
            (static_cast<long>(f + 1) * k_count) / freq_bins);
        const double mean =
            m.col(src).segment(k_begin, k_end - k_begin).mean();
        sample.data[(i * freq_bins + f) * time_steps + t] =
            static_cast<float>(mean);
      }
    }
  }
  return sample;
}

// --- dataset IO ---

namespace {

template <typename T>
void put_le(std::ofstream& f, T value) {
  std::uint8_t buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF);
  }
  f.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& f) {
  std::uint8_t buf[sizeof(T)];
  f.read(reinterpret_cast<char*>(buf), sizeof(T));
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(buf[i]) << (8 * i);
  }
  return value;
}

}  // namespace

void write_sample_file(const std::filesystem::path& path,
                       const ClassifierSample& sample) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CorruptTraceError("cannot open " + tmp.string() + " for writing");
    put_le<std::uint16_t>(f, static_cast<std::uint16_t>(sample.channels));
    put_le<std::uint16_t>(f, static_cast<std::uint16_t>(sample.freq_bins));
    put_le<std::uint16_t>(f, static_cast<std::uint16_t>(sample.time_steps));
    for (Eigen::Index i = 0; i < sample.data.size(); ++i) {
      put_le<std::uint32_t>(f, std::bit_cast<std::uint32_t>(sample.data[i]));
    }
    if (!f) throw CorruptTraceError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ClassifierSample read_sample_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorruptTraceError("cannot open sample " + path.string());
  ClassifierSample sample;
  sample.channels = get_le<std::uint16_t>(f);
  sample.freq_bins = get_le<std::uint16_t>(f);
  sample.time_steps = get_le<std::uint16_t>(f);
  if (!f || sample.channels == 0 || sample.freq_bins == 0 ||
      sample.time_steps == 0) {
    throw CorruptTraceError("bad sample header in " + path.string());
  }
  const Eigen::Index n = static_cast<Eigen::Index>(sample.channels) *
                         sample.freq_bins * sample.time_steps;
  sample.data.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sample.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(f));
    if (!f) throw CorruptTraceError("sample payload truncated: " + path.string());
  }
  return sample;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                   const std::vector<std::string>& missed_truth,
                   const std::vector<std::string>& unmatched_detections) {
  if (dataset.samples.size() != dataset.entries.size()) {
    throw ValidationError("dataset samples/entries size mismatch");
  }
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = nlohmann::json::array();
  for (std::size_t n = 0; n < dataset.samples.size(); ++n) {
    const DatasetEntry& e = dataset.entries[n];
    write_sample_file(dir / e.file, dataset.samples[n]);
    nlohmann::json row{
        {"file", e.file},
        {"label", e.label ? nlohmann::json(to_string(*e.label)) : nlohmann::json()},
        {"source_trace", e.source_trace},
        {"interval_s", {e.begin_s, e.end_s}},
    };
    if (!e.location.empty()) row["location"] = e.location;
    if (!e.split.empty()) row["split"] = e.split;
    manifest.push_back(row);
  }
  nlohmann::json doc{{"samples", manifest}};
  if (!missed_truth.empty()) doc["missed_truth_events"] = missed_truth;
  if (!unmatched_detections.empty()) {
    doc["unmatched_detections"] = unmatched_detections;
  }

  const std::filesystem::path manifest_path = dir / "manifest.json";
  const std::filesystem::path tmp = manifest_path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    f << doc.dump(2) << "\n";
    if (!f) throw CorruptTraceError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, manifest_path);
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream f(manifest_path);
  if (!f) throw CorruptTraceError("cannot open " + manifest_path.string());
  nlohmann::json doc;
  try {
    f >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptTraceError("manifest parse error: " + std::string(e.what()));
  }
  Dataset out;
  try {
    for (const auto& row : doc.at("samples")) {
      DatasetEntry e;
      e.file = row.at("file").get<std::string>();
      if (!row.at("label").is_null()) {
        e.label = movement_class_from_string(row.at("label").get<std::string>());
      }
      e.source_trace = row.value("source_trace", std::string{});
      e.begin_s = row.at("interval_s").at(0).get<double>();
      e.end_s = row.at("interval_s").at(1).get<double>();
      e.location = row.value("location", std::string{});
      e.split = row.value("split", std::string{});
      ClassifierSample sample = read_sample_file(dir / e.file);
      sample.label = e.label;
      out.entries.push_back(std::move(e));
      out.samples.push_back(std::move(sample));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptTraceError("manifest schema error: " + std::string(e.what()));
  }
  return out;
}

}  // namespace srs_sense
