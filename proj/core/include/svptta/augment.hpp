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
#include <vector>

#include "svptta/linalg.hpp"
#include "svptta/random.hpp"
#include "svptta/stats.hpp"

namespace svptta {

// Features expanded T-fold: row i*T + t is the t-th draw for original row i.
struct AugmentedBatch {
  Matrix features;                       // (K*T) x A
  LabelVector labels;                    // K*T, original pseudo-label repeated
  std::vector<std::size_t> source_index;  // augmented row -> original row
  std::size_t copies = 1;                // T
  // Classes whose covariance could not be factored and were copied unperturbed.
  std::vector<Label> fallback_classes;
};

inline constexpr std::size_t kDefaultAugmentCopies = 4;
inline constexpr Count kDefaultMinCount = 2;

// Draws `copies` samples per row from N(a_k, beta * tau_{y_k}). Rows whose
// class has fewer than `min_count` accumulated samples are copied as is.
AugmentedBatch augment_features(const Matrix& features,
                                const LabelVector& pseudo_labels,
                                const ClassStats& stats, double beta,
                                std::size_t copies, Count min_count,
                                RandomStream& rng);

struct SdaLoss {
  double value = 0.0;
  Matrix grad_features;  // (K*T) x A
  Matrix grad_weights;   // J x A
  Vector grad_bias;      // J
};

// Mean cross-entropy of the head logits (features W^T + b) over all K*T rows.
SdaLoss sda_loss(const AugmentedBatch& aug, const Matrix& head_weights,
                 const Vector& head_bias);

// Sums the T gradient rows of each original sample: K x A.
Matrix fold_augmented_gradient(const AugmentedBatch& aug, const Matrix& grad);

}  // namespace svptta
