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

#include "svptta/stats.hpp"

#include <algorithm>

#include "svptta/error.hpp"

namespace svptta {

ClassStats ClassStats::empty(std::size_t num_classes, std::size_t dim) {
  ClassStats s;
  s.num_classes = num_classes;
  s.dim = dim;
  s.means = Matrix(num_classes, dim);
  s.covariances.assign(num_classes, Matrix(dim, dim));
  s.counts.assign(num_classes, 0);
  return s;
}

Count ClassStats::total_count() const {
  Count total = 0;
  for (Count c : counts) total += c;
  return total;
}

BatchMoments batch_moments(const Matrix& features, const LabelVector& labels,
                           std::size_t num_classes) {
  require(labels.size() == features.rows(),
          "batch_moments: label count != feature rows");
  const std::size_t dim = features.cols();
  BatchMoments out{Matrix(num_classes, dim),
                   std::vector<Matrix>(num_classes, Matrix(dim, dim)),
                   std::vector<Count>(num_classes, 0)};
  for (std::size_t r = 0; r < labels.size(); ++r) {
    require(labels[r] < num_classes, "batch_moments: label out of range");
    ++out.counts[labels[r]];
    auto mean = out.means.row(labels[r]);
    const auto x = features.row(r);
    for (std::size_t a = 0; a < dim; ++a) mean[a] += x[a];
  }
  for (std::size_t j = 0; j < num_classes; ++j) {
    if (out.counts[j] == 0) continue;
    for (double& x : out.means.row(j)) x /= static_cast<double>(out.counts[j]);
  }
  // Second pass on centered rows.
  Vector d(dim);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const Label j = labels[r];
    const auto x = features.row(r);
    const auto mean = out.means.row(j);
    for (std::size_t a = 0; a < dim; ++a) d[a] = x[a] - mean[a];
    Matrix& cov = out.covariances[j];
    for (std::size_t a = 0; a < dim; ++a) {
      if (d[a] == 0.0) continue;
      auto row = cov.row(a);
      for (std::size_t b = 0; b < dim; ++b) row[b] += d[a] * d[b];
    }
  }
  for (std::size_t j = 0; j < num_classes; ++j) {
    if (out.counts[j] == 0) continue;
    out.covariances[j] *= 1.0 / static_cast<double>(out.counts[j]);
  }
  return out;
}

void merge_into(ClassStats& stats, const BatchMoments& batch) {
  require(batch.counts.size() == stats.num_classes &&
              batch.means.rows() == stats.num_classes &&
              batch.means.cols() == stats.dim,
          "merge_stats: dimension mismatch");
  const std::size_t dim = stats.dim;
  Vector delta(dim);
  for (std::size_t j = 0; j < stats.num_classes; ++j) {
    const Count h = batch.counts[j];
    if (h == 0) continue;
    const Count q = stats.counts[j];
    if (q == 0) {
      std::copy(batch.means.row(j).begin(), batch.means.row(j).end(),
                stats.means.row(j).begin());
      stats.covariances[j] = batch.covariances[j];
      stats.counts[j] = h;
      continue;
    }
    const double qd = static_cast<double>(q);
    const double hd = static_cast<double>(h);
    const double total = qd + hd;

    auto mean = stats.means.row(j);
    const auto batch_mean = batch.means.row(j);
    for (std::size_t a = 0; a < dim; ++a) delta[a] = mean[a] - batch_mean[a];

    Matrix& cov = stats.covariances[j];
    const Matrix& batch_cov = batch.covariances[j];
    const double cross = qd * hd / (total * total);
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) {
        cov(a, b) = (qd * cov(a, b) + hd * batch_cov(a, b)) / total +
                    cross * delta[a] * delta[b];
      }
    }
    for (std::size_t a = 0; a < dim; ++a)
      mean[a] = (qd * mean[a] + hd * batch_mean[a]) / total;
    stats.counts[j] = q + h;
  }
}

ClassStats merge_stats(ClassStats stats, const BatchMoments& batch) {
  merge_into(stats, batch);
  return stats;
}

double beta_schedule(std::size_t m, std::optional<std::size_t> total,
                     double beta0, std::size_t warmup) {
  require(m >= 1, "beta_schedule: batch index is 1-based");
  require(beta0 >= 0.0, "beta_schedule: beta0 must be >= 0");
  require(warmup >= 1, "beta_schedule: warmup must be >= 1");
  if (total && *total > 0) {
    const std::size_t capped = std::min(m, *total);
    return static_cast<double>(capped) / static_cast<double>(*total) * beta0;
  }
  return std::min(1.0, static_cast<double>(m) / static_cast<double>(warmup)) *
         beta0;
}

}  // namespace svptta
