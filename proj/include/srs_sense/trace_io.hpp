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

#include "srs_sense/csi.hpp"

namespace srs_sense {

// Trace file layout (all little-endian):
//   magic   "CSI5"            4 bytes
//   version u16 = 1
//   antenna_count     u16
//   subcarrier_count  u32
//   frame_count       u32
//   frame_interval_us u32
//   carrier_hz        u64
//   payload: frame-major x antenna-major x subcarrier-major
//            interleaved float32 (re, im) pairs.

/// Writes atomically: a temp file in the same directory is renamed over the
/// destination once complete.
void write_trace(const std::filesystem::path& path, const CsiRecording& rec);

/// Rejects unknown magic/version and truncated payloads.
CsiRecording read_trace(const std::filesystem::path& path);

}  // namespace srs_sense
