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
#include "svptta/stats.hpp"

namespace svptta {

struct Metrics {
  std::size_t count = 0;
  std::size_t mistakes = 0;
  double error = 0.0;       // mismatch fraction
  Vector per_class_error;   // NaN for classes absent from the truth
  std::vector<std::vector<Count>> confusion;  // [truth][prediction]
};

Metrics evaluate(const LabelVector& predictions, const LabelVector& truth,
                 std::size_t num_classes);

struct ClassDistances {
  Matrix distances;  // J x J; NaN rows/columns for missing classes
  std::vector<bool> present;
  bool missing_class = false;
};

// Diagonal: mean distance of class rows to their centroid. Off-diagonal:
// distance between centroids.
ClassDistances class_distance_matrix(const Matrix& features,
                                     const LabelVector& labels,
                                     std::size_t num_classes);

// Argmax of the prediction matrix rebuilt from its top N - drop singular
// triplets.
LabelVector truncated_prediction(const Matrix& probabilities, std::size_t drop);

}  // namespace svptta
