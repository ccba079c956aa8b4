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

#include "svptta/harness/metrics.hpp"

#include <cmath>
#include <limits>

#include "svptta/error.hpp"

namespace svptta {

Metrics evaluate(const LabelVector& predictions, const LabelVector& truth,
                 std::size_t num_classes) {
  require(predictions.size() == truth.size(),
          "evaluate: prediction and truth lengths differ");
  Metrics m;
  m.count = truth.size();
  m.confusion.assign(num_classes, std::vector<Count>(num_classes, 0));
  std::vector<std::size_t> per_class_total(num_classes, 0);
  std::vector<std::size_t> per_class_wrong(num_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] < num_classes && predictions[i] < num_classes,
            "evaluate: label out of range");
    ++m.confusion[truth[i]][predictions[i]];
    ++per_class_total[truth[i]];
    if (predictions[i] != truth[i]) {
      ++m.mistakes;
      ++per_class_wrong[truth[i]];
    }
  }
  m.error = m.count == 0 ? 0.0
                         : static_cast<double>(m.mistakes) / static_cast<double>(m.count);
  m.per_class_error.resize(num_classes);
  for (std::size_t j = 0; j < num_classes; ++j) {
    m.per_class_error[j] =
        per_class_total[j] == 0
            ? std::numeric_limits<double>::quiet_NaN()
            : static_cast<double>(per_class_wrong[j]) /
                  static_cast<double>(per_class_total[j]);
  }
  return m;
}

ClassDistances class_distance_matrix(const Matrix& features,
                                     const LabelVector& labels,
                                     std::size_t num_classes) {
  require(labels.size() == features.rows(),
          "class_distance_matrix: label count != feature rows");
  const BatchMoments moments = batch_moments(features, labels, num_classes);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ClassDistances out;
  out.distances = Matrix(num_classes, num_classes);
  out.present.resize(num_classes);
  for (std::size_t j = 0; j < num_classes; ++j) {
    out.present[j] = moments.counts[j] > 0;
    if (!out.present[j]) out.missing_class = true;
  }

  Vector spread(num_classes, 0.0);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto x = features.row(r);
    const auto c = moments.means.row(labels[r]);
    double d2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
    spread[labels[r]] += std::sqrt(d2);
  }
  for (std::size_t i = 0; i < num_classes; ++i) {
    for (std::size_t j = 0; j < num_classes; ++j) {
      double value = nan;
      if (out.present[i] && out.present[j]) {
        if (i == j) {
          value = spread[i] / static_cast<double>(moments.counts[i]);
        } else {
          const auto ci = moments.means.row(i);
          const auto cj = moments.means.row(j);
          double d2 = 0.0;
          for (std::size_t a = 0; a < ci.size(); ++a)
            d2 += (ci[a] - cj[a]) * (ci[a] - cj[a]);
          value = std::sqrt(d2);
        }
      }
      // Matrix rejects NaN through its constructors only; write directly.
      out.distances.data()[i * num_classes + j] = value;
    }
  }
  return out;
}

LabelVector truncated_prediction(const Matrix& probabilities, std::size_t drop) {
  const SvdResult s = svd(probabilities);
  require(drop < s.sigma.size(),
          "truncated_prediction: drop must be smaller than the singular value count");
  if (drop == 0) return argmax_rows(probabilities);
  SvdResult kept = s;
  for (std::size_t i = s.sigma.size() - drop; i < s.sigma.size(); ++i)
    kept.sigma[i] = 0.0;
  return argmax_rows(kept.reconstruct());
}

}  // namespace svptta
