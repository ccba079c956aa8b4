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

#include "svptta/augment.hpp"

#include <optional>

#include "svptta/error.hpp"
#include "svptta/losses.hpp"

namespace svptta {

AugmentedBatch augment_features(const Matrix& features,
                                const LabelVector& pseudo_labels,
                                const ClassStats& stats, double beta,
                                std::size_t copies, Count min_count,
                                RandomStream& rng) {
  require(pseudo_labels.size() == features.rows(),
          "augment_features: label count != feature rows");
  require(beta >= 0.0, "augment_features: beta must be >= 0");
  require(copies >= 1, "augment_features: copies must be >= 1");
  require(features.cols() == stats.dim, "augment_features: dimension mismatch");

  const std::size_t k = features.rows();
  const std::size_t dim = features.cols();
  AugmentedBatch out;
  out.copies = copies;
  out.features = Matrix(k * copies, dim);
  out.labels.resize(k * copies);
  out.source_index.resize(k * copies);

  // Factor beta * tau once per class actually needed.
  std::vector<std::optional<Matrix>> factors(stats.num_classes);
  std::vector<bool> tried(stats.num_classes, false);
  auto factor_for = [&](Label j) -> const std::optional<Matrix>& {
    if (!tried[j]) {
      tried[j] = true;
      if (beta > 0.0 && stats.counts[j] >= min_count) {
        const Matrix scaled = beta * stats.covariances[j];
        const double mean_diag = trace(scaled) / static_cast<double>(dim);
        try {
          factors[j] = cholesky(scaled, 1e-9 * mean_diag);
        } catch (const NotPositiveDefinite&) {
          out.fallback_classes.push_back(j);
        }
      }
    }
    return factors[j];
  };

  for (std::size_t i = 0; i < k; ++i) {
    const Label y = pseudo_labels[i];
    require(y < stats.num_classes, "augment_features: label out of range");
    const auto& chol = factor_for(y);
    const auto a = features.row(i);
    for (std::size_t t = 0; t < copies; ++t) {
      const std::size_t r = i * copies + t;
      out.labels[r] = y;
      out.source_index[r] = i;
      auto dst = out.features.row(r);
      if (chol) {
        const Vector draw = sample_mvn(a, *chol, rng);
        std::copy(draw.begin(), draw.end(), dst.begin());
      } else {
        std::copy(a.begin(), a.end(), dst.begin());
      }
    }
  }
  return out;
}

SdaLoss sda_loss(const AugmentedBatch& aug, const Matrix& head_weights,
                 const Vector& head_bias) {
  require(head_weights.cols() == aug.features.cols(),
          "sda_loss: head weight / feature dimension mismatch");
  require(head_bias.size() == head_weights.rows(),
          "sda_loss: head bias / weight mismatch");
  Matrix logits = matmul_nt(aug.features, head_weights);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += head_bias[j];
  }
  LossValueGrad ce = cross_entropy_loss(logits, aug.labels);
  SdaLoss out;
  out.value = ce.value;
  out.grad_features = matmul(ce.grad, head_weights);
  out.grad_weights = matmul_tn(ce.grad, aug.features);
  out.grad_bias.assign(head_bias.size(), 0.0);
  for (std::size_t r = 0; r < ce.grad.rows(); ++r) {
    const auto g = ce.grad.row(r);
    for (std::size_t j = 0; j < g.size(); ++j) out.grad_bias[j] += g[j];
  }
  return out;
}

Matrix fold_augmented_gradient(const AugmentedBatch& aug, const Matrix& grad) {
  require(grad.rows() == aug.source_index.size(),
          "fold_augmented_gradient: row count mismatch");
  const std::size_t k = aug.source_index.size() / aug.copies;
  Matrix out(k, grad.cols());
  for (std::size_t r = 0; r < grad.rows(); ++r) {
    auto dst = out.row(aug.source_index[r]);
    const auto src = grad.row(r);
    for (std::size_t a = 0; a < src.size(); ++a) dst[a] += src[a];
  }
  return out;
}

}  // namespace svptta
