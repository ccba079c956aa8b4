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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svptta/linalg.hpp"
#include "svptta/model.hpp"
#include "svptta/random.hpp"
#include "svptta/stats.hpp"

namespace svptta {

// Adaptation strategies. The first four are the baselines; the rest are the
// singular-value / semantic-augmentation pipeline and its ablation arms.
enum class Method {
  kSource,   // running BN statistics, no updates
  kNorm,     // batch BN statistics, no updates
  kTent,     // entropy minimization on BN affine parameters
  kTentTwice,  // two entropy updates per batch
  kSvpOnly,  // singular-value penalization only
  kEntSvp,   // entropy + singular-value penalization in one pass
  kSdaOnly,  // semantic augmentation cross-entropy only
  kEntSda,   // entropy pass, then augmentation pass
  kSvpSda,   // singular-value pass, then augmentation pass
};

std::string_view method_name(Method m);
// Throws ConfigError for unknown names.
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

enum class ResetPolicy { kNever, kPerCorruption };
std::string_view reset_policy_name(ResetPolicy p);
ResetPolicy parse_reset_policy(std::string_view name);

std::string_view adapt_set_name(AdaptSet s);
AdaptSet parse_adapt_set(std::string_view name);

struct AdaptConfig {
  Method method = Method::kSvpSda;
  double alpha1 = 1.0;
  double alpha2 = 0.3;
  double beta0 = 0.5;
  std::size_t t_aug = 4;
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  std::optional<std::size_t> total_batches;
  std::size_t warmup = kDefaultWarmup;
  Count min_count = 2;
  ResetPolicy reset_policy = ResetPolicy::kNever;
  AdaptSet adapt_set = AdaptSet::kBnAffine;
  // Optimize the singular-value and augmentation terms with one joint
  // gradient instead of two sequential updates.
  bool joint = false;

  // Throws ConfigError.
  void validate() const;
  friend bool operator==(const AdaptConfig&, const AdaptConfig&) = default;
};

struct AdaptState {
  ModelParams params;
  AdamState opt;
  ClassStats stats;
  std::size_t batch_counter = 0;
  RandomStream rng;

  friend bool operator==(const AdaptState&, const AdaptState&) = default;
};

AdaptState make_adapt_state(ModelParams params, const AdaptConfig& config);

struct BatchTrace {
  std::size_t index = 0;  // 1-based batch counter m
  std::string segment;
  std::size_t size = 0;
  std::optional<double> error;
  // Pass-1 objective terms on the prediction matrix (always recorded).
  double entropy = 0.0;
  double svd_sum = 0.0;
  double svd_var = 0.0;
  // Second-pass losses, when the method has one.
  std::optional<double> sda;
  std::optional<double> entropy_second;
  std::optional<double> beta;
  Vector singular_values;  // of the pass-1 probability matrix
  std::size_t fallback_classes = 0;

  friend bool operator==(const BatchTrace&, const BatchTrace&) = default;
};

struct BatchOutcome {
  LabelVector predictions;  // from pass 1, before any second update
  BatchTrace trace;
};

// Processes one unlabeled batch, mutating `state`.
BatchOutcome adapt_batch(AdaptState& state, const Matrix& batch,
                         const AdaptConfig& config);

struct StreamBatch {
  Matrix inputs;
  std::optional<LabelVector> labels;  // only used for scoring
  std::string segment;
};

struct SegmentSummary {
  std::string name;
  std::size_t batches = 0;
  std::size_t samples = 0;
  std::size_t labeled = 0;
  std::size_t mistakes = 0;
  std::optional<double> error;

  friend bool operator==(const SegmentSummary&, const SegmentSummary&) = default;
};

struct StreamReport {
  AdaptConfig config;
  std::size_t num_classes = 0;
  std::vector<BatchTrace> batches;
  std::vector<SegmentSummary> segments;
  std::size_t samples = 0;
  std::size_t labeled = 0;
  std::size_t mistakes = 0;
  std::optional<double> error;
  Vector per_class_error;              // NaN where a class never appeared
  std::vector<std::vector<Count>> confusion;  // [truth][prediction]
  std::map<std::string, Matrix> diagnostics;
  std::optional<double> wall_clock_seconds;

  friend bool operator==(const StreamReport&, const StreamReport&) = default;
};

// Processes batches strictly in order, mutating `state`. Segment boundaries
// trigger a reset to the entry state under ResetPolicy::kPerCorruption.
StreamReport run_stream(AdaptState& state, std::span<const StreamBatch> batches,
                        const AdaptConfig& config);

}  // namespace svptta
