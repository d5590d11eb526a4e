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

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srs_sense/movement.hpp"

namespace srs_sense::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Two conv(3x3, pad 1) + ReLU + maxpool(2x2) blocks into a dense softmax
/// head. Spatial dimensions must be divisible by 4.
struct NetConfig {
  int in_channels = 4;
  int in_h = kSampleFreqBins;
  int in_w = kSampleTimeSteps;
  int conv1_filters = 8;
  int conv2_filters = 16;
  int classes = 4;

  int flat_size() const { return conv2_filters * (in_h / 4) * (in_w / 4); }
};

void validate(const NetConfig& net);

/// All weights and biases. Conv kernels are stored GEMM-ready, one filter per
/// row over (in_channel, ky, kx); serialization order is fixed, see save_model.
struct ModelParams {
  NetConfig net;
  MatrixXd conv1_w;  // (conv1_filters, in_channels*9)
  VectorXd conv1_b;
  MatrixXd conv2_w;  // (conv2_filters, conv1_filters*9)
  VectorXd conv2_b;
  MatrixXd dense_w;  // (classes, flat_size)
  VectorXd dense_b;
};

/// Fan-in-scaled uniform init, biases zero, deterministic in the seed.
ModelParams init_params(const NetConfig& net, std::uint64_t seed);

struct Sample {
  VectorXd data;  // (in_channels*in_h*in_w), index (c*h + y)*w + x
  int label = -1;
  std::string location;
};

Sample to_sample(const ClassifierSample& cs);

/// Softmax class probabilities; throws on a shape mismatch.
VectorXd forward(const ModelParams& params, const VectorXd& sample);

/// Cross entropy -log p[label], with p clamped at 1e-12.
double loss(const VectorXd& probs, int label);

using Gradients = ModelParams;

/// Exact analytic gradients of the mean loss over the batch.
Gradients gradients(const ModelParams& params, const std::vector<Sample>& batch);

enum class Optimizer { sgd_momentum, adam };

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 30;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::adam;
};

struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> train_accuracy;
  std::vector<double> eval_loss;
  std::vector<double> eval_accuracy;
  std::array<std::array<int, 4>, 4> confusion{};  // [true][predicted]
};

/// Deterministic training: fixed init scheme and a per-epoch shuffle stream
/// keyed by (seed, epoch). heldout may be empty.
std::pair<ModelParams, TrainReport> train(const std::vector<Sample>& train_set,
                                          const std::vector<Sample>& heldout,
                                          const TrainConfig& config);

/// argmax class; ties break toward the smallest index.
int predict(const ModelParams& params, const VectorXd& sample);

struct EvalResult {
  double accuracy = 0.0;
  std::array<std::array<int, 4>, 4> confusion{};
  std::vector<std::pair<std::string, double>> group_accuracy;  // by location
};

EvalResult evaluate(const ModelParams& params, const std::vector<Sample>& samples,
                    bool group_by_location = false);

// Model file: magic "CNN1", version, net geometry, then float32 tensors in
// declared order (conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b),
// column-major, little-endian.
void save_model(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_model(const std::filesystem::path& path);

nlohmann::json report_to_json(const TrainReport& report);
nlohmann::json eval_to_json(const EvalResult& result);

}  // namespace srs_sense::nn
