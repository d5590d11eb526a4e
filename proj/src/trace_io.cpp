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

#include "srs_sense/trace_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace srs_sense {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'I', '5'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(p[i]) << (8 * i);
  }
  return value;
}

void put_f32_le(std::uint8_t* dst, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  dst[0] = static_cast<std::uint8_t>(bits & 0xFF);
  dst[1] = static_cast<std::uint8_t>((bits >> 8) & 0xFF);
  dst[2] = static_cast<std::uint8_t>((bits >> 16) & 0xFF);
  dst[3] = static_cast<std::uint8_t>((bits >> 24) & 0xFF);
}

float get_f32_le(const std::uint8_t* src) {
  const std::uint32_t bits = get_le<std::uint32_t>(src);
  return std::bit_cast<float>(bits);
}

}  // namespace

void write_trace(const std::filesystem::path& path, const CsiRecording& rec) {
  validate_recording(rec);

  std::vector<std::uint8_t> header;
  header.insert(header.end(), kMagic, kMagic + 4);
  put_le<std::uint16_t>(header, kVersion);
  put_le<std::uint16_t>(header, static_cast<std::uint16_t>(rec.antenna_count()));
  put_le<std::uint32_t>(header, static_cast<std::uint32_t>(rec.subcarrier_count()));
  put_le<std::uint32_t>(header, static_cast<std::uint32_t>(rec.frame_count()));
  put_le<std::uint32_t>(header,
                        static_cast<std::uint32_t>(std::llround(rec.frame_interval * 1e6)));
  put_le<std::uint64_t>(header, static_cast<std::uint64_t>(std::llround(rec.carrier_hz)));

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CorruptTraceError("cannot open " + tmp.string() + " for writing");
    f.write(reinterpret_cast<const char*>(header.data()),
            static_cast<std::streamsize>(header.size()));

    const int k_count = rec.subcarrier_count();
    std::vector<std::uint8_t> row(static_cast<std::size_t>(k_count) * 8);
    for (int t = 0; t < rec.frame_count(); ++t) {
      for (int i = 0; i < rec.antenna_count(); ++i) {
        const CMatrix& m = rec.antennas[i];
        for (int k = 0; k < k_count; ++k) {
          const Complex v = m(k, t);
          put_f32_le(&row[static_cast<std::size_t>(k) * 8],
                     static_cast<float>(v.real()));
          put_f32_le(&row[static_cast<std::size_t>(k) * 8 + 4],
                     static_cast<float>(v.imag()));
        }
        f.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size()));
      }
    }
    if (!f) throw CorruptTraceError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CsiRecording read_trace(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorruptTraceError("cannot open trace " + path.string());

  std::uint8_t header[28];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  if (f.gcount() != sizeof(header)) {
    throw CorruptTraceError("trace header truncated: " + path.string());
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    throw CorruptTraceError("bad trace magic in " + path.string());
  }
  const auto version = get_le<std::uint16_t>(header + 4);
  if (version != kVersion) {
    throw CorruptTraceError("unsupported trace version " +
                            std::to_string(version) + " in " + path.string());
  }
  const auto antenna_count = get_le<std::uint16_t>(header + 6);
  const auto subcarrier_count = get_le<std::uint32_t>(header + 8);
  const auto frame_count = get_le<std::uint32_t>(header + 12);
  const auto frame_interval_us = get_le<std::uint32_t>(header + 16);
  const auto carrier_hz = get_le<std::uint64_t>(header + 20);

  if (antenna_count < 2 || subcarrier_count < 1 || frame_count < 2 ||
      frame_interval_us == 0) {
    throw CorruptTraceError("trace header fields out of range in " +
                            path.string());
  }

  CsiRecording rec;
  rec.frame_interval = static_cast<double>(frame_interval_us) * 1e-6;
  rec.carrier_hz = static_cast<double>(carrier_hz);
  rec.antennas.assign(antenna_count,
                      CMatrix(subcarrier_count, frame_count));

  std::vector<std::uint8_t> row(static_cast<std::size_t>(subcarrier_count) * 8);
  for (std::uint32_t t = 0; t < frame_count; ++t) {
    for (std::uint16_t i = 0; i < antenna_count; ++i) {
      f.read(reinterpret_cast<char*>(row.data()),
             static_cast<std::streamsize>(row.size()));
      if (f.gcount() != static_cast<std::streamsize>(row.size())) {
        throw CorruptTraceError("trace payload truncated: " + path.string());
      }
      CMatrix& m = rec.antennas[i];
      for (std::uint32_t k = 0; k < subcarrier_count; ++k) {
        const float re = get_f32_le(&row[static_cast<std::size_t>(k) * 8]);
        const float im = get_f32_le(&row[static_cast<std::size_t>(k) * 8 + 4]);
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
            Complex{re, im};
      }
    }
  }
  // Trailing bytes mean the header lied about the payload size.
  f.peek();
  if (!f.eof()) {
    throw CorruptTraceError("unexpected trailing bytes in " + path.string());
  }
  validate_recording(rec);
  return rec;
}

}  // namespace srs_sense
