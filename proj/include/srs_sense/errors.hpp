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

#include <stdexcept>
#include <string>

namespace srs_sense {

/// Bad inputs: malformed configs, contract violations, out-of-range fields.
/// Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A reference sample too small to divide by; message names the (k, t) cell.
class DegenerateReferenceError : public ValidationError {
 public:
  DegenerateReferenceError(const std::string& what, int subcarrier, int frame)
      : ValidationError(what + " at subcarrier " + std::to_string(subcarrier) +
                        ", frame " + std::to_string(frame)),
        subcarrier_(subcarrier),
        frame_(frame) {}
  int subcarrier() const { return subcarrier_; }
  int frame() const { return frame_; }

 private:
  int subcarrier_;
  int frame_;
};

/// Unreadable or inconsistent on-disk data. Maps to CLI exit code 3.
class CorruptTraceError : public std::runtime_error {
 public:
  explicit CorruptTraceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input is well-formed but too short/sparse for the requested operation.
/// Maps to CLI exit code 4.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace srs_sense
