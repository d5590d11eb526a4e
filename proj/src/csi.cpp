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

#include "srs_sense/csi.hpp"

#include <algorithm>
#include <cmath>

namespace srs_sense {

CMatrix estimate_csi(const SounderGrid& grid) {
  if (grid.received.rows() != grid.reference.rows() ||
      grid.received.cols() != grid.reference.cols()) {
    throw ValidationError("sounder grid dimensions differ: received " +
                          std::to_string(grid.received.rows()) + "x" +
                          std::to_string(grid.received.cols()) +
                          ", reference " +
                          std::to_string(grid.reference.rows()) + "x" +
                          std::to_string(grid.reference.cols()));
  }
  for (Eigen::Index t = 0; t < grid.reference.cols(); ++t) {
    for (Eigen::Index k = 0; k < grid.reference.rows(); ++k) {
      if (std::abs(grid.reference(k, t)) < kDegenerateMagnitude) {
        throw DegenerateReferenceError("reference symbol magnitude below 1e-12",
                                       static_cast<int>(k),
                                       static_cast<int>(t));
      }
    }
  }
  return grid.received.cwiseQuotient(grid.reference);
}

void validate_recording(const CsiRecording& rec) {
  if (rec.antenna_count() < 2) {
    throw ValidationError("antenna_count must be >= 2, got " +
                          std::to_string(rec.antenna_count()));
  }
  if (rec.subcarrier_count() < 1) {
    throw ValidationError("subcarrier_count must be >= 1");
  }
  if (rec.frame_count() < 2) {
    throw ValidationError("frame_count must be >= 2, got " +
                          std::to_string(rec.frame_count()));
  }
  if (!(rec.frame_interval > 0.0)) {
    throw ValidationError("frame_interval must be > 0");
  }
  for (int i = 0; i < rec.antenna_count(); ++i) {
    const CMatrix& m = rec.antennas[i];
    if (m.rows() != rec.subcarrier_count() || m.cols() != rec.frame_count()) {
      throw ValidationError("antenna " + std::to_string(i) +
                            " tensor dimensions are inconsistent");
    }
    if (!m.allFinite()) {
      throw ValidationError("antenna " + std::to_string(i) +
                            " contains non-finite samples");
    }
  }
}

SubcarrierMask usable_subcarriers(const CsiRecording& rec, int ref_antenna) {
  if (ref_antenna < 0 || ref_antenna >= rec.antenna_count()) {
    throw ValidationError("ref_antenna out of range: " +
                          std::to_string(ref_antenna));
  }
  const CMatrix& ref = rec.antennas[ref_antenna];
  const int k_count = rec.subcarrier_count();
  const int t_count = rec.frame_count();

  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(k_count) * t_count);
  for (int t = 0; t < t_count; ++t) {
    for (int k = 0; k < k_count; ++k) mags.push_back(std::abs(ref(k, t)));
  }
  const auto mid = mags.begin() + mags.size() / 2;
  std::nth_element(mags.begin(), mid, mags.end());
  const double median = *mid;
  const double floor_mag = 1e-6 * median;

  SubcarrierMask mask(static_cast<std::size_t>(k_count), true);
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < t_count; ++t) {
      if (std::abs(ref(k, t)) < floor_mag) {
        mask[static_cast<std::size_t>(k)] = false;
        break;
      }
    }
  }
  return mask;
}

namespace {

NormalizedCsi normalize_impl(const CsiRecording& rec, int ref_antenna,
                             const SubcarrierMask* mask) {
  if (ref_antenna < 0 || ref_antenna >= rec.antenna_count()) {
    throw ValidationError("ref_antenna out of range: " +
                          std::to_string(ref_antenna));
  }
  const CMatrix& ref = rec.antennas[ref_antenna];
  const int k_count = rec.subcarrier_count();
  const int t_count = rec.frame_count();

  for (int k = 0; k < k_count; ++k) {
    if (mask && !(*mask)[static_cast<std::size_t>(k)]) continue;
    for (int t = 0; t < t_count; ++t) {
      if (std::abs(ref(k, t)) < kDegenerateMagnitude) {
        throw DegenerateReferenceError(
            "reference-antenna sample magnitude below 1e-12", k, t);
      }
    }
  }

  NormalizedCsi out;
  out.ref_antenna = ref_antenna;
  out.frame_interval = rec.frame_interval;
  out.antennas.reserve(rec.antennas.size());
  for (const CMatrix& m : rec.antennas) {
    out.antennas.push_back(m.cwiseQuotient(ref));
  }
  if (mask) {
    for (int k = 0; k < k_count; ++k) {
      if ((*mask)[static_cast<std::size_t>(k)]) continue;
      for (CMatrix& m : out.antennas) {
        m.row(k).setConstant(Complex{1.0, 0.0});
      }
    }
  }
  return out;
}

}  // namespace

NormalizedCsi normalize_antenna_ratio(const CsiRecording& rec,
                                      int ref_antenna) {
  return normalize_impl(rec, ref_antenna, nullptr);
}

NormalizedCsi normalize_antenna_ratio(const CsiRecording& rec, int ref_antenna,
                                      const SubcarrierMask& mask) {
  if (mask.size() != static_cast<std::size_t>(rec.subcarrier_count())) {
    throw ValidationError("subcarrier mask size mismatch");
  }
  return normalize_impl(rec, ref_antenna, &mask);
}

Series unwrap_phase(const Series& wrapped) {
  Series out(wrapped.size());
  if (wrapped.size() == 0) return out;
  out[0] = wrapped[0];
  for (Eigen::Index t = 1; t < wrapped.size(); ++t) {
    double d = wrapped[t] - wrapped[t - 1];
    d -= 2.0 * M_PI * std::floor((d + M_PI) / (2.0 * M_PI));
    out[t] = out[t - 1] + d;
  }
  return out;
}

FeatureTensors extract_features(const NormalizedCsi& norm) {
  FeatureTensors out;
  out.frame_interval = norm.frame_interval;
  const int t_count = norm.frame_count();
  const int k_count = norm.subcarrier_count();
  out.amplitude.reserve(norm.antennas.size());
  out.phase.reserve(norm.antennas.size());
  for (const CMatrix& m : norm.antennas) {
    out.amplitude.emplace_back(
        (m.array().real().square() + m.array().imag().square()).sqrt());
    RMatrix phase(k_count, t_count);
    Series angles(t_count);
    for (int k = 0; k < k_count; ++k) {
      for (int t = 0; t < t_count; ++t) {
        angles[t] = std::arg(m(k, t));
      }
      phase.row(k) = unwrap_phase(angles).transpose();
    }
    out.phase.push_back(std::move(phase));
  }
  return out;
}

Series frame_delta(const CsiRecording& rec, int antenna) {
  if (antenna < 0 || antenna >= rec.antenna_count()) {
    throw ValidationError("antenna out of range: " + std::to_string(antenna));
  }
  if (rec.frame_count() < 2) {
    throw ValidationError("frame_delta needs at least 2 frames");
  }
  const CMatrix& m = rec.antennas[antenna];
  Series s(rec.frame_count() - 1);
  for (int t = 1; t < rec.frame_count(); ++t) {
    s[t - 1] = (m.col(t) - m.col(t - 1)).cwiseAbs().sum();
  }
  return s;
}

}  // namespace srs_sense
