// Copyright 2026 The svptta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "svptta/linalg.hpp"
#include "svptta/random.hpp"

namespace svptta {

// Fully-connected classifier: every hidden block is Linear -> BatchNorm ->
// ReLU; the last hidden block's output is the deep feature F fed to a linear
// head producing logits.
struct Architecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden = {64, 64, 32};
  std::size_t num_classes = 0;
  double bn_eps = 1e-8;

  std::size_t feature_dim() const { return hidden.empty() ? input_dim : hidden.back(); }
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct HiddenLayer {
  Matrix weight;  // out x in
  Vector bias;
  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;

  friend bool operator==(const HiddenLayer&, const HiddenLayer&) = default;
};

struct ModelParams {
  Architecture arch;
  std::vector<HiddenLayer> layers;
  Matrix head_weight;  // J x A
  Vector head_bias;    // J

  // Throws ContractViolation when shapes disagree with `arch` or a running
  // variance is not positive.
  void validate() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// He-normal weights, zero biases, unit BN scale, unit running variance.
ModelParams init_params(const Architecture& arch, RandomStream& rng);

enum class BnMode { kRunning, kBatch };

struct LayerCache {
  Matrix input;       // K x in
  Matrix pre_bn;      // K x out
  Vector mean;        // statistics used for normalization
  Vector var;
  Vector inv_std;
  Matrix normalized;  // x-hat
  Matrix output;      // post-ReLU
};

struct ForwardCache {
  BnMode mode = BnMode::kBatch;
  std::vector<LayerCache> layers;
  Matrix features;       // F, K x A
  Matrix logits;         // O, K x J
  Matrix probabilities;  // softmax(O)
};

ForwardCache forward(const ModelParams& params, const Matrix& inputs, BnMode mode);

// Which tensors receive gradients. kAll is used for source training only.
enum class AdaptSet { kBnAffine, kBnAffinePlusHead, kAll };

struct LayerGrads {
  std::optional<Matrix> weight;
  std::optional<Vector> bias;
  Vector gamma;
  Vector beta;
};

struct Gradients {
  AdaptSet set = AdaptSet::kBnAffine;
  std::vector<LayerGrads> layers;
  std::optional<Matrix> head_weight;
  std::optional<Vector> head_bias;

  Gradients& operator+=(const Gradients& other);
  // Flattened in parameter declaration order, matching adaptable_tensors().
  std::vector<std::span<const double>> tensors() const;
};

// Backpropagates a gradient on the logits and/or directly on the features.
// Either seed may be empty (0 x 0), meaning no contribution.
Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Matrix& grad_logits, AdaptSet set);
Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Matrix& grad_logits, const Matrix& grad_features,
                   AdaptSet set);

std::vector<std::span<double>> adaptable_tensors(ModelParams& params, AdaptSet set);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  AdaptSet set = AdaptSet::kBnAffine;
  std::uint64_t step = 0;
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;

  static AdamState for_params(const ModelParams& params, AdaptSet set, double lr);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update of the tensors in state.set.
void adam_step(AdamState& state, ModelParams& params, const Gradients& grads);

struct SourceDataset {
  const Matrix& features;
  const LabelVector& labels;
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double lr = 1e-3;
  double bn_momentum = 0.1;
};

// Cross-entropy training of every parameter with batch-mode BN, updating the
// running statistics. Throws TrainingError if the loss becomes non-finite.
ModelParams train_source(const Architecture& arch, SourceDataset data,
                         const TrainConfig& config, RandomStream& rng);

// Little-endian checkpoint: "SVPM", u32 version, architecture, f64 tensors.
inline constexpr std::uint32_t kModelFormatVersion = 1;
void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_model(const ModelParams& params);
ModelParams decode_model(std::span<const std::uint8_t> bytes);

}  // namespace svptta
