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

#include "srs_sense/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "srs_sense/rng.hpp"

namespace srs_sense::nn {

void validate(const NetConfig& net) {
  if (net.in_channels < 1 || net.conv1_filters < 1 || net.conv2_filters < 1 ||
      net.classes < 2) {
    throw ValidationError("net geometry fields must be positive (classes >= 2)");
  }
  if (net.in_h % 4 != 0 || net.in_w % 4 != 0 || net.in_h < 4 || net.in_w < 4) {
    throw ValidationError("net input height/width must be multiples of 4");
  }
}

namespace {

/// 3x3 im2col with zero padding 1: one column per output pixel, rows ordered
/// (channel, ky, kx).
void im2col3x3(const VectorXd& img, int channels, int h, int w,
               MatrixXd& col) {
  col.setZero(channels * 9, h * w);
  for (int c = 0; c < channels; ++c) {
    const int base = c * h * w;
    for (int ky = -1; ky <= 1; ++ky) {
      for (int kx = -1; kx <= 1; ++kx) {
        const int row = c * 9 + (ky + 1) * 3 + (kx + 1);
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky;
          if (sy < 0 || sy >= h) continue;
          const int x_lo = std::max(0, -kx);
          const int x_hi = std::min(w, w - kx);
          for (int x = x_lo; x < x_hi; ++x) {
            col(row, y * w + x) = img[base + sy * w + x + kx];
          }
        }
      }
    }
  }
}

/// Scatter-add transpose of im2col3x3.
void col2im3x3(const MatrixXd& col, int channels, int h, int w,
               VectorXd& img) {
  img.setZero(channels * h * w);
  for (int c = 0; c < channels; ++c) {
    const int base = c * h * w;
    for (int ky = -1; ky <= 1; ++ky) {
      for (int kx = -1; kx <= 1; ++kx) {
        const int row = c * 9 + (ky + 1) * 3 + (kx + 1);
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky;
          if (sy < 0 || sy >= h) continue;
          const int x_lo = std::max(0, -kx);
          const int x_hi = std::min(w, w - kx);
          for (int x = x_lo; x < x_hi; ++x) {
            img[base + sy * w + x + kx] += col(row, y * w + x);
          }
        }
      }
    }
  }
}

/// 2x2 max pooling over an activation matrix (filters x h*w). Ties keep the
/// first index in scan order, so pooling is deterministic.
void maxpool2x2(const MatrixXd& act, int h, int w, MatrixXd& out,
                Eigen::MatrixXi& argmax) {
  const int oh = h / 2, ow = w / 2;
  out.resize(act.rows(), oh * ow);
  argmax.resize(act.rows(), oh * ow);
  for (int f = 0; f < act.rows(); ++f) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const int p00 = (2 * y) * w + 2 * x;
        const int candidates[4] = {p00, p00 + 1, p00 + w, p00 + w + 1};
        int best = candidates[0];
        double best_v = act(f, best);
        for (int n = 1; n < 4; ++n) {
          if (act(f, candidates[n]) > best_v) {
            best = candidates[n];
            best_v = act(f, best);
          }
        }
        out(f, y * ow + x) = best_v;
        argmax(f, y * ow + x) = best;
      }
    }
  }
}

struct ForwardCache {
  MatrixXd col1, conv1_pre, pool1;
  Eigen::MatrixXi pool1_arg;
  MatrixXd col2, conv2_pre, pool2;
  Eigen::MatrixXi pool2_arg;
  VectorXd flat, logits, probs;
};

void forward_cached(const ModelParams& p, const VectorXd& sample,
                    ForwardCache& c) {
  const NetConfig& net = p.net;
  if (sample.size() !=
      static_cast<Eigen::Index>(net.in_channels) * net.in_h * net.in_w) {
    throw ValidationError(
        "sample shape mismatch: expected " +
        std::to_string(net.in_channels) + "x" + std::to_string(net.in_h) +
        "x" + std::to_string(net.in_w) + " = " +
        std::to_string(net.in_channels * net.in_h * net.in_w) + " values, got " +
        std::to_string(sample.size()));
  }
  const int h1 = net.in_h, w1 = net.in_w;
  const int h2 = h1 / 2, w2 = w1 / 2;

  im2col3x3(sample, net.in_channels, h1, w1, c.col1);
  c.conv1_pre.noalias() = p.conv1_w * c.col1;
  c.conv1_pre.colwise() += p.conv1_b;
  maxpool2x2(c.conv1_pre.cwiseMax(0.0), h1, w1, c.pool1, c.pool1_arg);

  // pool1 rows are conv1 filters; reinterpret as channels of an image.
  VectorXd mid(net.conv1_filters * h2 * w2);
  for (int f = 0; f < net.conv1_filters; ++f) {
    mid.segment(f * h2 * w2, h2 * w2) = c.pool1.row(f).transpose();
  }
  im2col3x3(mid, net.conv1_filters, h2, w2, c.col2);
  c.conv2_pre.noalias() = p.conv2_w * c.col2;
  c.conv2_pre.colwise() += p.conv2_b;
  maxpool2x2(c.conv2_pre.cwiseMax(0.0), h2, w2, c.pool2, c.pool2_arg);

  const int pix3 = (h2 / 2) * (w2 / 2);
  c.flat.resize(net.conv2_filters * pix3);
  for (int f = 0; f < net.conv2_filters; ++f) {
    c.flat.segment(f * pix3, pix3) = c.pool2.row(f).transpose();
  }
  c.logits.noalias() = p.dense_w * c.flat;
  c.logits += p.dense_b;

  const double m = c.logits.maxCoeff();
  c.probs = (c.logits.array() - m).exp();
  c.probs /= c.probs.sum();
}

void zero_like(const ModelParams& p, Gradients& g) {
  g.net = p.net;
  g.conv1_w.setZero(p.conv1_w.rows(), p.conv1_w.cols());
  g.conv1_b.setZero(p.conv1_b.size());
  g.conv2_w.setZero(p.conv2_w.rows(), p.conv2_w.cols());
  g.conv2_b.setZero(p.conv2_b.size());
  g.dense_w.setZero(p.dense_w.rows(), p.dense_w.cols());
  g.dense_b.setZero(p.dense_b.size());
}

/// Backprop one sample into the accumulator with the given weight.
void accumulate_gradients(const ModelParams& p, const ForwardCache& c,
                          int label, double weight, Gradients& g) {
  const NetConfig& net = p.net;
  const int h1 = net.in_h, w1 = net.in_w;
  const int h2 = h1 / 2, w2 = w1 / 2;
  const int pix3 = (h2 / 2) * (w2 / 2);

  VectorXd dlogits = c.probs;
  dlogits[label] -= 1.0;
  dlogits *= weight;

  g.dense_w.noalias() += dlogits * c.flat.transpose();
  g.dense_b += dlogits;
  VectorXd dflat = p.dense_w.transpose() * dlogits;

  // Route through pool2 argmax, then the conv2 ReLU mask.
  MatrixXd dconv2 = MatrixXd::Zero(net.conv2_filters, h2 * w2);
  for (int f = 0; f < net.conv2_filters; ++f) {
    for (int q = 0; q < pix3; ++q) {
      dconv2(f, c.pool2_arg(f, q)) += dflat[f * pix3 + q];
    }
  }
  dconv2 = (c.conv2_pre.array() > 0.0).cast<double>() * dconv2.array();

  g.conv2_w.noalias() += dconv2 * c.col2.transpose();
  g.conv2_b += dconv2.rowwise().sum();

  MatrixXd dcol2 = p.conv2_w.transpose() * dconv2;
  VectorXd dmid;
  col2im3x3(dcol2, net.conv1_filters, h2, w2, dmid);

  MatrixXd dconv1 = MatrixXd::Zero(net.conv1_filters, h1 * w1);
  for (int f = 0; f < net.conv1_filters; ++f) {
    const auto seg = dmid.segment(f * h2 * w2, h2 * w2);
    for (int q = 0; q < h2 * w2; ++q) {
      dconv1(f, c.pool1_arg(f, q)) += seg[q];
    }
  }
  dconv1 = (c.conv1_pre.array() > 0.0).cast<double>() * dconv1.array();

  g.conv1_w.noalias() += dconv1 * c.col1.transpose();
  g.conv1_b += dconv1.rowwise().sum();
}

template <typename Fn>
void for_each_tensor(ModelParams& a, ModelParams& b, ModelParams& c, Fn&& fn) {
  fn(a.conv1_w, b.conv1_w, c.conv1_w);
  fn(a.conv1_b, b.conv1_b, c.conv1_b);
  fn(a.conv2_w, b.conv2_w, c.conv2_w);
  fn(a.conv2_b, b.conv2_b, c.conv2_b);
  fn(a.dense_w, b.dense_w, c.dense_w);
  fn(a.dense_b, b.dense_b, c.dense_b);
}

}  // namespace

ModelParams init_params(const NetConfig& net, std::uint64_t seed) {
  validate(net);
  rng::Xoshiro256pp gen(rng::derive_stream(seed, 0x494E4954ull));  // "INIT"
  ModelParams p;
  p.net = net;
  const auto fill = [&gen](MatrixXd& m, int rows, int cols, int fan_in) {
    const double bound = std::sqrt(1.0 / fan_in);
    m.resize(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = gen.uniform(-bound, bound);
      }
    }
  };
  fill(p.conv1_w, net.conv1_filters, net.in_channels * 9, net.in_channels * 9);
  p.conv1_b = VectorXd::Zero(net.conv1_filters);
  fill(p.conv2_w, net.conv2_filters, net.conv1_filters * 9,
       net.conv1_filters * 9);
  p.conv2_b = VectorXd::Zero(net.conv2_filters);
  fill(p.dense_w, net.classes, net.flat_size(), net.flat_size());
  p.dense_b = VectorXd::Zero(net.classes);
  return p;
}

Sample to_sample(const ClassifierSample& cs) {
  Sample s;
  s.data = cs.data.cast<double>();
  s.label = cs.label ? static_cast<int>(*cs.label) : -1;
  return s;
}

VectorXd forward(const ModelParams& params, const VectorXd& sample) {
  ForwardCache cache;
  forward_cached(params, sample, cache);
  return cache.probs;
}

double loss(const VectorXd& probs, int label) {
  if (label < 0 || label >= probs.size()) {
    throw ValidationError("label out of range");
  }
  return -std::log(std::max(probs[label], 1e-12));
}

Gradients gradients(const ModelParams& params, const std::vector<Sample>& batch) {
  if (batch.empty()) throw ValidationError("gradient batch is empty");
  Gradients g;
  zero_like(params, g);
  ForwardCache cache;
  const double weight = 1.0 / static_cast<double>(batch.size());
  for (const Sample& s : batch) {
    forward_cached(params, s.data, cache);
    accumulate_gradients(params, cache, s.label, weight, g);
  }
  return g;
}

namespace {

struct OptimizerState {
  Gradients m, v;  // momentum / first moment, second moment
  int step = 0;
};

}  // namespace

std::pair<ModelParams, TrainReport> train(const std::vector<Sample>& train_set,
                                          const std::vector<Sample>& heldout,
                                          const TrainConfig& config) {
  if (train_set.empty()) throw ValidationError("training set is empty");
  if (!(config.learning_rate > 0.0)) {
    throw ValidationError("learning_rate must be > 0");
  }
  if (config.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (config.batch_size < 1) throw ValidationError("batch_size must be >= 1");

  std::array<int, 16> class_seen{};
  int max_label = 0;
  for (const Sample& s : train_set) {
    if (s.label < 0) throw ValidationError("training sample without a label");
    max_label = std::max(max_label, s.label);
    if (s.label < 16) class_seen[static_cast<std::size_t>(s.label)] = 1;
  }
  int distinct = 0;
  for (int seen : class_seen) distinct += seen;
  if (distinct < 2) {
    throw ValidationError("training labels must cover at least 2 classes");
  }

  NetConfig net;
  net.in_channels = 0;  // derived from the first sample below
  const auto sample_len = train_set.front().data.size();
  // Default geometry: channels inferred from the fixed (F, T) plane.
  net.in_h = kSampleFreqBins;
  net.in_w = kSampleTimeSteps;
  if (sample_len % (net.in_h * net.in_w) != 0) {
    throw ValidationError("training samples do not match the (64, 128) plane");
  }
  net.in_channels = static_cast<int>(sample_len / (net.in_h * net.in_w));
  net.classes = std::max(4, max_label + 1);
  validate(net);

  ModelParams params = init_params(net, config.seed);

  OptimizerState state;
  zero_like(params, state.m);
  zero_like(params, state.v);

  TrainReport report;
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  ForwardCache cache;
  Gradients grads;
  zero_like(params, grads);

  constexpr double kAdamB1 = 0.9, kAdamB2 = 0.999, kAdamEps = 1e-8;
  constexpr double kMomentum = 0.9;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng::Xoshiro256pp shuffle(
        rng::derive_stream(config.seed, 0x53485546ull + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(shuffle.bounded(i));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    int epoch_correct = 0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t batch_end =
          std::min(order.size(), pos + static_cast<std::size_t>(config.batch_size));
      const double weight = 1.0 / static_cast<double>(batch_end - pos);
      zero_like(params, grads);
      for (std::size_t b = pos; b < batch_end; ++b) {
        const Sample& s = train_set[order[b]];
        forward_cached(params, s.data, cache);
        epoch_loss += loss(cache.probs, s.label);
        Eigen::Index arg;
        cache.probs.maxCoeff(&arg);
        if (static_cast<int>(arg) == s.label) ++epoch_correct;
        accumulate_gradients(params, cache, s.label, weight, grads);
      }
      ++state.step;
      if (config.optimizer == Optimizer::adam) {
        const double bc1 = 1.0 - std::pow(kAdamB1, state.step);
        const double bc2 = 1.0 - std::pow(kAdamB2, state.step);
        const double lr = config.learning_rate;
        for_each_tensor(state.m, state.v, grads, [&](auto& m, auto& v, auto& g) {
          m = kAdamB1 * m + (1.0 - kAdamB1) * g;
          v = kAdamB2 * v + (1.0 - kAdamB2) * g.cwiseProduct(g);
          g = (lr * (m / bc1).array() /
               ((v / bc2).array().sqrt() + kAdamEps))
                  .matrix();
        });
        for_each_tensor(params, grads, state.m,
                        [&](auto& p, auto& update, auto&) { p -= update; });
      } else {
        for_each_tensor(state.m, grads, params, [&](auto& m, auto& g, auto& p) {
          m = kMomentum * m + g;
          p -= config.learning_rate * m;
        });
      }
      pos = batch_end;
    }

    report.train_loss.push_back(epoch_loss / static_cast<double>(train_set.size()));
    report.train_accuracy.push_back(static_cast<double>(epoch_correct) /
                                    static_cast<double>(train_set.size()));
    if (!heldout.empty()) {
      double ev_loss = 0.0;
      int ev_correct = 0;
      for (const Sample& s : heldout) {
        forward_cached(params, s.data, cache);
        ev_loss += loss(cache.probs, s.label);
        Eigen::Index arg;
        cache.probs.maxCoeff(&arg);
        if (static_cast<int>(arg) == s.label) ++ev_correct;
      }
      report.eval_loss.push_back(ev_loss / static_cast<double>(heldout.size()));
      report.eval_accuracy.push_back(static_cast<double>(ev_correct) /
                                     static_cast<double>(heldout.size()));
    }
  }

  const std::vector<Sample>& confusion_set =
      heldout.empty() ? train_set : heldout;
  for (const Sample& s : confusion_set) {
    const int pred = predict(params, s.data);
    if (s.label >= 0 && s.label < 4 && pred >= 0 && pred < 4) {
      report.confusion[static_cast<std::size_t>(s.label)]
                      [static_cast<std::size_t>(pred)]++;
    }
  }
  return {std::move(params), std::move(report)};
}

int predict(const ModelParams& params, const VectorXd& sample) {
  const VectorXd probs = forward(params, sample);
  Eigen::Index arg;
  probs.maxCoeff(&arg);  // first maximum wins ties
  return static_cast<int>(arg);
}

EvalResult evaluate(const ModelParams& params, const std::vector<Sample>& samples,
                    bool group_by_location) {
  EvalResult result;
  if (samples.empty()) return result;
  std::map<std::string, std::pair<int, int>> groups;  // correct, total
  int correct = 0;
  for (const Sample& s : samples) {
    const int pred = predict(params, s.data);
    const bool hit = pred == s.label;
    correct += hit ? 1 : 0;
    if (s.label >= 0 && s.label < 4 && pred >= 0 && pred < 4) {
      result.confusion[static_cast<std::size_t>(s.label)]
                      [static_cast<std::size_t>(pred)]++;
    }
    if (group_by_location) {
      auto& g = groups[s.location];
      g.first += hit ? 1 : 0;
      g.second += 1;
    }
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
  for (const auto& [name, counts] : groups) {
    result.group_accuracy.emplace_back(
        name, static_cast<double>(counts.first) / counts.second);
  }
  return result;
}

// --- model file ---

namespace {

constexpr char kModelMagic[4] = {'C', 'N', 'N', '1'};

void put_u16(std::ofstream& f, std::uint16_t v) {
  const std::uint8_t buf[2] = {static_cast<std::uint8_t>(v & 0xFF),
                               static_cast<std::uint8_t>(v >> 8)};
  f.write(reinterpret_cast<const char*>(buf), 2);
}

std::uint16_t get_u16(std::ifstream& f) {
  std::uint8_t buf[2];
  f.read(reinterpret_cast<char*>(buf), 2);
  return static_cast<std::uint16_t>(buf[0] | (buf[1] << 8));
}

void put_tensor(std::ofstream& f, const MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j)));
      const std::uint8_t buf[4] = {
          static_cast<std::uint8_t>(bits & 0xFF),
          static_cast<std::uint8_t>((bits >> 8) & 0xFF),
          static_cast<std::uint8_t>((bits >> 16) & 0xFF),
          static_cast<std::uint8_t>((bits >> 24) & 0xFF)};
      f.write(reinterpret_cast<const char*>(buf), 4);
    }
  }
}

void get_tensor(std::ifstream& f, MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::uint8_t buf[4];
      f.read(reinterpret_cast<char*>(buf), 4);
      const std::uint32_t bits =
          static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
          (static_cast<std::uint32_t>(buf[2]) << 16) |
          (static_cast<std::uint32_t>(buf[3]) << 24);
      m(i, j) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelParams& params) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CorruptTraceError("cannot open " + tmp.string() + " for writing");
    f.write(kModelMagic, 4);
    put_u16(f, 1);  // version
    put_u16(f, static_cast<std::uint16_t>(params.net.in_channels));
    put_u16(f, static_cast<std::uint16_t>(params.net.in_h));
    put_u16(f, static_cast<std::uint16_t>(params.net.in_w));
    put_u16(f, static_cast<std::uint16_t>(params.net.conv1_filters));
    put_u16(f, static_cast<std::uint16_t>(params.net.conv2_filters));
    put_u16(f, static_cast<std::uint16_t>(params.net.classes));
    put_tensor(f, params.conv1_w);
    put_tensor(f, params.conv1_b);
    put_tensor(f, params.conv2_w);
    put_tensor(f, params.conv2_b);
    put_tensor(f, params.dense_w);
    put_tensor(f, params.dense_b);
    if (!f) throw CorruptTraceError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorruptTraceError("cannot open model " + path.string());
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw CorruptTraceError("bad model magic in " + path.string());
  }
  const std::uint16_t version = get_u16(f);
  if (version != 1) {
    throw CorruptTraceError("unsupported model version " +
                            std::to_string(version));
  }
  ModelParams p;
  p.net.in_channels = get_u16(f);
  p.net.in_h = get_u16(f);
  p.net.in_w = get_u16(f);
  p.net.conv1_filters = get_u16(f);
  p.net.conv2_filters = get_u16(f);
  p.net.classes = get_u16(f);
  if (!f) throw CorruptTraceError("model header truncated: " + path.string());
  validate(p.net);

  p.conv1_w.resize(p.net.conv1_filters, p.net.in_channels * 9);
  p.conv1_b.resize(p.net.conv1_filters);
  p.conv2_w.resize(p.net.conv2_filters, p.net.conv1_filters * 9);
  p.conv2_b.resize(p.net.conv2_filters);
  p.dense_w.resize(p.net.classes, p.net.flat_size());
  p.dense_b.resize(p.net.classes);
  MatrixXd tmp;
  get_tensor(f, p.conv1_w);
  tmp = p.conv1_b;
  get_tensor(f, tmp);
  p.conv1_b = tmp;
  get_tensor(f, p.conv2_w);
  tmp = p.conv2_b;
  get_tensor(f, tmp);
  p.conv2_b = tmp;
  get_tensor(f, p.dense_w);
  tmp = p.dense_b;
  get_tensor(f, tmp);
  p.dense_b = tmp;
  if (!f) throw CorruptTraceError("model payload truncated: " + path.string());
  f.peek();
  if (!f.eof()) throw CorruptTraceError("unexpected trailing bytes in " + path.string());
  return p;
}

nlohmann::json report_to_json(const TrainReport& report) {
  return nlohmann::json{
      {"train_loss", report.train_loss},
      {"train_accuracy", report.train_accuracy},
      {"eval_loss", report.eval_loss},
      {"eval_accuracy", report.eval_accuracy},
      {"confusion", report.confusion},
  };
}

nlohmann::json eval_to_json(const EvalResult& result) {
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [name, acc] : result.group_accuracy) groups[name] = acc;
  return nlohmann::json{
      {"accuracy", result.accuracy},
      {"confusion", result.confusion},
      {"group_accuracy", groups},
  };
}

}  // namespace srs_sense::nn
