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

#include "svptta/harness/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "svptta/error.hpp"
#include "test_support.hpp"

namespace svptta {
namespace {

Dataset labeled(std::size_t rows, const std::string& corruption, std::uint64_t seed) {
  Dataset d;
  d.features = testing::random_matrix(rows, 3, seed);
  d.labels = LabelVector(rows);
  for (std::size_t i = 0; i < rows; ++i) (*d.labels)[i] = static_cast<Label>(i % 2);
  d.meta = {corruption, 2, seed, 2};
  return d;
}

TEST(MakeStream, SpreadsBatchesAcrossDatasets) {
  const std::vector<Dataset> targets{labeled(40, "x", 1), labeled(40, "y", 2)};
  const StreamSplit s = make_stream(targets, 8, 5);
  ASSERT_EQ(s.batches.size(), 5u);
  EXPECT_EQ(s.batches[0].segment, "x/2");
  EXPECT_EQ(s.batches[2].segment, "x/2");
  EXPECT_EQ(s.batches[3].segment, "y/2");
  EXPECT_EQ(s.batches[1].inputs(0, 0), targets[0].features(8, 0));
  EXPECT_EQ(s.leftover.size(), 80u - 40u);
  EXPECT_EQ(s.leftover.features(0, 0), targets[0].features(24, 0));
  EXPECT_EQ(s.leftover.labels->size(), 40u);
}

TEST(MakeStream, RejectsTooFewRows) {
  EXPECT_THROW(make_stream({labeled(10, "x", 1)}, 8, 2), ConfigError);
  EXPECT_THROW(make_stream({}, 8, 2), ConfigError);
}

TEST(ChunkStream, UsesEveryRowAndKeepsUsefulPartialBatches) {
  const std::vector<Dataset> targets{labeled(21, "x", 1), labeled(17, "y", 2)};
  const auto batches = chunk_stream(targets, 8);
  // 21 = 8 + 8 + 5; 17 = 8 + 8 + 1 (the single row is dropped).
  ASSERT_EQ(batches.size(), 5u);
  EXPECT_EQ(batches[2].inputs.rows(), 5u);
  EXPECT_EQ(batches[4].inputs.rows(), 8u);
  EXPECT_EQ(batches[4].segment, "y/2");
  EXPECT_THROW(chunk_stream(targets, 1), ConfigError);
}

TEST(Summaries, MeanStddevAndStandardError) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.stderr_mean, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(summarize({7.0}).stddev, 0.0);
  const Summary t = summarize({2.0, 2.0, 2.0, 2.0});
  EXPECT_NEAR(pooled_standard_error(s, t), std::sqrt(5.0 / 6.0) / 2.0, 1e-15);
}

TEST(AblationArms, CoverTheStudy) {
  AdaptConfig base;
  base.alpha2 = 0.3;
  const auto arms = ablation_arms(base);
  ASSERT_EQ(arms.size(), 8u);
  EXPECT_EQ(arms[2].name, "svd");
  EXPECT_EQ(arms[2].config.alpha2, 0.0);
  EXPECT_EQ(arms[3].config.alpha2, 0.3);
  EXPECT_EQ(arms.back().config.method, Method::kSvpSda);
}

class Experiment : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ExperimentSpec spec;
    spec.bench.source_per_class = 150;
    spec.bench.target_per_class = 40;
    spec.num_batches = 8;
    spec.batch_size = 32;
    spec.heldout_size = 96;
    run_ = std::make_unique<PreparedRun>(prepare_run(spec, 1));
  }
  static void TearDownTestSuite() { run_.reset(); }
  static std::unique_ptr<PreparedRun> run_;
};
std::unique_ptr<PreparedRun> Experiment::run_;

TEST_F(Experiment, PreparedRunShape) {
  EXPECT_EQ(run_->stream.size(), 8u);
  EXPECT_EQ(run_->heldout.size(), 96u);
  EXPECT_LE(run_->clean_error, 0.1);
  EXPECT_EQ(run_->seed, 1u);
}

TEST_F(Experiment, HeldoutRowsNeverAppearInTheStream) {
  for (std::size_t h = 0; h < run_->heldout.size(); ++h)
    for (const StreamBatch& b : run_->stream)
      for (std::size_t r = 0; r < b.inputs.rows(); ++r)
        ASSERT_FALSE(std::equal(b.inputs.row(r).begin(), b.inputs.row(r).end(),
                                run_->heldout.features.row(h).begin()));
}

TEST_F(Experiment, RunMethodIsDeterministicAndLeavesSourceIntact) {
  AdaptConfig c;
  c.lr = 1e-2;
  const ModelParams before = run_->source;
  const RunResult a = run_method(*run_, c);
  const RunResult b = run_method(*run_, c);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.heldout.error, b.heldout.error);
  EXPECT_EQ(run_->source, before);
  EXPECT_EQ(a.final_state.batch_counter, 8u);
}

TEST_F(Experiment, HeldoutEvaluationMatchesDirectComputation) {
  const HeldoutEval e = evaluate_heldout(run_->source, run_->heldout);
  const ForwardCache c = forward(run_->source, run_->heldout.features, BnMode::kBatch);
  const LabelVector pred = argmax_rows(c.probabilities);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != (*run_->heldout.labels)[i];
  EXPECT_DOUBLE_EQ(e.error, static_cast<double>(wrong) / static_cast<double>(pred.size()));
  EXPECT_EQ(e.singular_values.size(), 8u);
}

TEST_F(Experiment, SweepCoversTheGrid) {
  AdaptConfig c;
  const std::vector<PreparedRun> runs{*run_};
  const auto points = run_sweep(runs, c, {0.5, 1.0}, {0.0}, {0.25, 0.5});
  ASSERT_EQ(points.size(), 4u);
  EXPECT_EQ(points[1].alpha1, 0.5);
  EXPECT_EQ(points[1].beta0, 0.5);
  EXPECT_EQ(points[3].alpha1, 1.0);
  EXPECT_EQ(points[0].error.values.size(), 1u);
}

TEST_F(Experiment, DiagnosticsAreConsistent) {
  const Diagnostics d = compute_diagnostics(run_->source, run_->heldout, BnMode::kBatch);
  EXPECT_EQ(d.truncation_error.size(), 8u);
  EXPECT_DOUBLE_EQ(d.truncation_error[0], evaluate_heldout(run_->source, run_->heldout).error);
  EXPECT_EQ(d.class_distances.rows(), 8u);
  EXPECT_EQ(d.features.rows(), run_->heldout.size());
  Dataset unlabeled = run_->heldout;
  unlabeled.labels.reset();
  EXPECT_THROW(compute_diagnostics(run_->source, unlabeled, BnMode::kBatch), ConfigError);
}

}  // namespace
}  // namespace svptta
