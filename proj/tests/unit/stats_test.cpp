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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "svptta/error.hpp"
#include "test_support.hpp"

namespace svptta {
namespace {

using testing::random_matrix;

LabelVector random_labels(std::size_t n, std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  LabelVector y(n);
  for (Label& v : y) v = static_cast<Label>(gen() % classes);
  return y;
}

// Mean and population covariance of the rows of `x` with label j, computed
// from scratch after gathering.
void pooled(const Matrix& x, const LabelVector& y, Label j, Vector& mean, Matrix& cov,
            std::size_t& count) {
  const std::size_t d = x.cols();
  std::vector<Vector> rows;
  for (std::size_t r = 0; r < x.rows(); ++r)
    if (y[r] == j) rows.emplace_back(x.row(r).begin(), x.row(r).end());
  count = rows.size();
  mean.assign(d, 0.0);
  cov = Matrix(d, d);
  if (rows.empty()) return;
  for (const Vector& v : rows)
    for (std::size_t a = 0; a < d; ++a) mean[a] += v[a] / static_cast<double>(count);
  for (const Vector& v : rows)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        cov(a, b) += (v[a] - mean[a]) * (v[b] - mean[b]) / static_cast<double>(count);
}

void expect_matches_pooled(const ClassStats& s, const Matrix& x, const LabelVector& y,
                           double tol) {
  for (Label j = 0; j < s.num_classes; ++j) {
    Vector mean;
    Matrix cov;
    std::size_t count = 0;
    pooled(x, y, j, mean, cov, count);
    EXPECT_EQ(s.counts[j], count);
    for (std::size_t a = 0; a < s.dim; ++a) EXPECT_NEAR(s.means(j, a), mean[a], tol);
    EXPECT_LE(max_abs_diff(s.covariances[j], cov), tol);
  }
}

ClassStats stream(const Matrix& x, const LabelVector& y, std::size_t classes,
                  const std::vector<std::size_t>& cuts) {
  ClassStats s = ClassStats::empty(classes, x.cols());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const std::size_t n = cuts[i + 1] - cuts[i];
    Matrix part(n, x.cols());
    LabelVector labels(y.begin() + static_cast<std::ptrdiff_t>(cuts[i]),
                       y.begin() + static_cast<std::ptrdiff_t>(cuts[i + 1]));
    for (std::size_t r = 0; r < n; ++r)
      std::copy(x.row(cuts[i] + r).begin(), x.row(cuts[i] + r).end(), part.row(r).begin());
    merge_into(s, batch_moments(part, labels, classes));
  }
  return s;
}

TEST(BatchMoments, SingleSample) {
  const BatchMoments m = batch_moments(Matrix{{1.0, 2.0}}, {1}, 3);
  EXPECT_EQ(m.counts, (std::vector<Count>{0, 1, 0}));
  EXPECT_EQ(m.means(1, 0), 1.0);
  EXPECT_EQ(m.means(1, 1), 2.0);
  EXPECT_EQ(m.covariances[1], Matrix(2, 2));
  EXPECT_EQ(m.covariances[0], Matrix(2, 2));
}

TEST(BatchMoments, TwoPoints) {
  const Vector x{1.0, 4.0}, y{3.0, 0.0};
  const BatchMoments m = batch_moments(Matrix{{1.0, 4.0}, {3.0, 0.0}}, {0, 0}, 1);
  const Vector mu{2.0, 2.0};
  Matrix expected(2, 2);
  for (const Vector& v : {x, y})
    expected += outer(Vector{v[0] - mu[0], v[1] - mu[1]}, Vector{v[0] - mu[0], v[1] - mu[1]}) * 0.5;
  EXPECT_EQ(m.means(0, 0), 2.0);
  EXPECT_EQ(m.means(0, 1), 2.0);
  EXPECT_LE(max_abs_diff(m.covariances[0], expected), 1e-15);
}

TEST(BatchMoments, MatchesGatheredOracle) {
  const Matrix x = random_matrix(50, 4, 1);
  const LabelVector y = random_labels(50, 3, 2);
  const BatchMoments m = batch_moments(x, y, 3);
  for (Label j = 0; j < 3; ++j) {
    Vector mean;
    Matrix cov;
    std::size_t count = 0;
    pooled(x, y, j, mean, cov, count);
    EXPECT_EQ(m.counts[j], count);
    for (std::size_t a = 0; a < 4; ++a) EXPECT_NEAR(m.means(j, a), mean[a], 1e-12);
    EXPECT_LE(max_abs_diff(m.covariances[j], cov), 1e-12);
  }
}

TEST(BatchMoments, LabelOutOfRangeIsContractViolation) {
  EXPECT_THROW(batch_moments(Matrix(2, 2), {0, 5}, 3), ContractViolation);
}

TEST(MergeStats, VirginStatsTakeBatchMomentsExactly) {
  const Matrix x = random_matrix(30, 3, 3);
  const LabelVector y = random_labels(30, 4, 4);
  const BatchMoments m = batch_moments(x, y, 4);
  const ClassStats s = merge_stats(ClassStats::empty(4, 3), m);
  EXPECT_EQ(s.means, m.means);
  EXPECT_EQ(s.covariances, m.covariances);
  EXPECT_EQ(s.counts, m.counts);
}

TEST(MergeStats, EmptyBatchLeavesStatsUnchanged) {
  const Matrix x = random_matrix(20, 3, 5);
  const ClassStats s = merge_stats(ClassStats::empty(2, 3), batch_moments(x, random_labels(20, 2, 6), 2));
  const ClassStats t = merge_stats(s, batch_moments(Matrix(0, 3), {}, 2));
  EXPECT_EQ(s, t);
}

TEST(MergeStats, TenBatchesEqualSinglePass) {
  const Matrix x = random_matrix(200, 5, 7, 2.0);
  const LabelVector y = random_labels(200, 3, 8);
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i <= 200; i += 20) cuts.push_back(i);
  expect_matches_pooled(stream(x, y, 3, cuts), x, y, 1e-9);
}

TEST(MergeStats, AnyPartitionAndOrderAgree) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 50 + gen() % 150;
    Matrix x = random_matrix(n, 4, 100 + trial, 3.0);
    for (double& v : x.data()) v += 5.0;  // offset stresses the cross term
    const LabelVector y = random_labels(n, 5, 200 + trial);
    std::vector<std::size_t> cuts{0, n};
    for (int k = 0; k < 9; ++k) cuts.push_back(1 + gen() % (n - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const ClassStats forward = stream(x, y, 5, cuts);
    expect_matches_pooled(forward, x, y, 1e-9);

    // Same batches, reversed order.
    Matrix rx(n, 4);
    LabelVector ry;
    std::size_t at = 0;
    for (std::size_t i = cuts.size() - 1; i > 0; --i) {
      for (std::size_t r = cuts[i - 1]; r < cuts[i]; ++r, ++at) {
        std::copy(x.row(r).begin(), x.row(r).end(), rx.row(at).begin());
        ry.push_back(y[r]);
      }
    }
    std::vector<std::size_t> rcuts{0};
    for (std::size_t i = cuts.size() - 1; i > 0; --i) rcuts.push_back(rcuts.back() + cuts[i] - cuts[i - 1]);
    const ClassStats backward = stream(rx, ry, 5, rcuts);
    EXPECT_EQ(forward.counts, backward.counts);
    EXPECT_LE(max_abs_diff(forward.means, backward.means), 1e-9);
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_LE(max_abs_diff(forward.covariances[j], backward.covariances[j]), 1e-9);
  }
}

TEST(MergeStats, CovariancesStaySymmetricAndPsd) {
  const Matrix x = random_matrix(120, 6, 11);
  const LabelVector y = random_labels(120, 4, 12);
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i <= 120; i += 7) cuts.push_back(i);
  if (cuts.back() != 120) cuts.push_back(120);
  const ClassStats s = stream(x, y, 4, cuts);
  for (const Matrix& c : s.covariances) {
    EXPECT_LE(max_abs_diff(c, c.transpose()), 1e-9);
    EXPECT_GE(testing::smallest_eigenvalue(c), -1e-9 * trace(c));
  }
  EXPECT_EQ(s.total_count(), 120u);
}

TEST(MergeStats, DimensionMismatchIsContractViolation) {
  EXPECT_THROW(merge_stats(ClassStats::empty(2, 3), batch_moments(Matrix(2, 4), {0, 1}, 2)),
               ContractViolation);
}

TEST(BetaSchedule, LinearWhenTotalKnown) {
  EXPECT_DOUBLE_EQ(beta_schedule(100, 100, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(beta_schedule(50, 100, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(beta_schedule(1, 4, 1.0), 0.25);
}

TEST(BetaSchedule, WarmupWhenTotalUnknown) {
  EXPECT_DOUBLE_EQ(beta_schedule(10, std::nullopt, 0.8, 20), 0.4);
  EXPECT_DOUBLE_EQ(beta_schedule(20, std::nullopt, 0.8, 20), 0.8);
  EXPECT_DOUBLE_EQ(beta_schedule(500, std::nullopt, 0.8, 20), 0.8);
  EXPECT_DOUBLE_EQ(beta_schedule(25, std::nullopt, 1.0), 0.5);
}

TEST(BetaSchedule, InvalidArgumentsAreContractViolations) {
  EXPECT_THROW(beta_schedule(0, 10, 0.5), ContractViolation);
  EXPECT_THROW(beta_schedule(1, 10, -0.5), ContractViolation);
  EXPECT_THROW(beta_schedule(1, std::nullopt, 0.5, 0), ContractViolation);
}

}  // namespace
}  // namespace svptta
