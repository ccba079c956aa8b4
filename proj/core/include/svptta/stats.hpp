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
#include <optional>
#include <vector>

#include "svptta/linalg.hpp"

namespace svptta {

using Count = std::uint64_t;

// Per-class moments of one mini-batch. Covariances are population (1/h).
struct BatchMoments {
  Matrix means;                   // J x A
  std::vector<Matrix> covariances;  // J matrices, A x A
  std::vector<Count> counts;      // h_j
};

// Running per-class feature statistics keyed by pseudo-label.
struct ClassStats {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  Matrix means;                   // J x A
  std::vector<Matrix> covariances;  // J matrices, A x A
  std::vector<Count> counts;      // q_j

  static ClassStats empty(std::size_t num_classes, std::size_t dim);

  Count total_count() const;
  friend bool operator==(const ClassStats&, const ClassStats&) = default;
};

BatchMoments batch_moments(const Matrix& features, const LabelVector& labels,
                           std::size_t num_classes);

// Exact pooled-moments merge. Classes absent from the batch are untouched.
ClassStats merge_stats(ClassStats stats, const BatchMoments& batch);
void merge_into(ClassStats& stats, const BatchMoments& batch);

inline constexpr std::size_t kDefaultWarmup = 50;

// Augmentation strength for 1-based batch index m. With a known stream
// length the ramp is linear to beta0 at m == total; otherwise it saturates
// after `warmup` batches.
double beta_schedule(std::size_t m, std::optional<std::size_t> total,
                     double beta0, std::size_t warmup = kDefaultWarmup);

}  // namespace svptta
