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

#include "svptta/adapt.hpp"

#include <gtest/gtest.h>

#include <memory>

#include "svptta/error.hpp"
#include "svptta/harness/experiment.hpp"

namespace svptta {
namespace {

class Adapt : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ExperimentSpec spec;
    spec.bench.source_per_class = 150;
    spec.bench.target_per_class = 20;
    spec.num_batches = 12;
    spec.batch_size = 16;
    spec.heldout_size = 64;
    run_ = std::make_unique<PreparedRun>(prepare_run(spec, 3));
  }
  static void TearDownTestSuite() { run_.reset(); }

  static AdaptConfig config(Method m) {
    AdaptConfig c;
    c.method = m;
    c.lr = 1e-2;
    c.seed = 3;
    c.total_batches = run_->stream.size();
    return c;
  }
  static const Matrix& batch(std::size_t i) { return run_->stream[i].inputs; }
  static std::span<const StreamBatch> stream() { return run_->stream; }

  static std::unique_ptr<PreparedRun> run_;
};
std::unique_ptr<PreparedRun> Adapt::run_;

TEST_F(Adapt, SourceUsesRunningStatisticsAndNeverUpdates) {
  const AdaptConfig c = config(Method::kSource);
  AdaptState s = make_adapt_state(run_->source, c);
  const AdaptState before = s;
  const BatchOutcome out = adapt_batch(s, batch(0), c);
  EXPECT_EQ(out.predictions,
            argmax_rows(forward(run_->source, batch(0), BnMode::kRunning).probabilities));
  EXPECT_EQ(s.params, before.params);
  EXPECT_EQ(s.opt, before.opt);
  EXPECT_EQ(s.stats, before.stats);
  EXPECT_EQ(s.rng, before.rng);
  EXPECT_EQ(s.batch_counter, 1u);
}

TEST_F(Adapt, SourceAcceptsSingleRowBatches) {
  const AdaptConfig c = config(Method::kSource);
  AdaptState s = make_adapt_state(run_->source, c);
  Matrix one(1, batch(0).cols());
  std::copy(batch(0).row(0).begin(), batch(0).row(0).end(), one.row(0).begin());
  EXPECT_EQ(adapt_batch(s, one, c).predictions.size(), 1u);
}

TEST_F(Adapt, NormUsesBatchStatisticsAndNeverUpdates) {
  const AdaptConfig c = config(Method::kNorm);
  AdaptState s = make_adapt_state(run_->source, c);
  const BatchOutcome out = adapt_batch(s, batch(1), c);
  EXPECT_EQ(out.predictions,
            argmax_rows(forward(run_->source, batch(1), BnMode::kBatch).probabilities));
  EXPECT_EQ(s.params, run_->source);
}

TEST_F(Adapt, SingleRowBatchIsContractViolationForBatchStatistics) {
  for (Method m : {Method::kNorm, Method::kTent, Method::kSvpSda}) {
    const AdaptConfig c = config(m);
    AdaptState s = make_adapt_state(run_->source, c);
    EXPECT_THROW(adapt_batch(s, Matrix(1, batch(0).cols()), c), ContractViolation);
  }
}

TEST_F(Adapt, OnlyBnAffineParametersChange) {
  for (Method m : {Method::kTent, Method::kSvpOnly, Method::kSvpSda, Method::kEntSda}) {
    const AdaptConfig c = config(m);
    AdaptState s = make_adapt_state(run_->source, c);
    for (std::size_t i = 0; i < 3; ++i) adapt_batch(s, batch(i), c);
    for (std::size_t l = 0; l < s.params.layers.size(); ++l) {
      const HiddenLayer& a = s.params.layers[l];
      const HiddenLayer& b = run_->source.layers[l];
      EXPECT_EQ(a.weight, b.weight);
      EXPECT_EQ(a.bias, b.bias);
      EXPECT_EQ(a.running_mean, b.running_mean);
      EXPECT_EQ(a.running_var, b.running_var);
      EXPECT_NE(a.gamma, b.gamma) << method_name(m);
    }
    EXPECT_EQ(s.params.head_weight, run_->source.head_weight);
    EXPECT_EQ(s.params.head_bias, run_->source.head_bias);
  }
}

TEST_F(Adapt, HeadChangesOnlyWhenInAdaptSet) {
  AdaptConfig c = config(Method::kSvpSda);
  c.adapt_set = AdaptSet::kBnAffinePlusHead;
  AdaptState s = make_adapt_state(run_->source, c);
  adapt_batch(s, batch(0), c);
  EXPECT_NE(s.params.head_weight, run_->source.head_weight);
  EXPECT_EQ(s.params.layers[0].weight, run_->source.layers[0].weight);
}

TEST_F(Adapt, PredictionsPrecedeTheUpdate) {
  for (Method m : {Method::kTent, Method::kSvpSda, Method::kTentTwice}) {
    const AdaptConfig c = config(m);
    AdaptState s = make_adapt_state(run_->source, c);
    for (std::size_t i = 0; i < 4; ++i) {
      const ModelParams before = s.params;
      const BatchOutcome out = adapt_batch(s, batch(i), c);
      EXPECT_EQ(out.predictions,
                argmax_rows(forward(before, batch(i), BnMode::kBatch).probabilities));
      EXPECT_NE(s.params, before);
    }
  }
}

TEST_F(Adapt, ZeroWeightSvpReducesToNorm) {
  AdaptConfig c = config(Method::kSvpOnly);
  c.alpha1 = 0.0;
  c.alpha2 = 0.0;
  AdaptState s = make_adapt_state(run_->source, c);
  const StreamReport svp = run_stream(s, stream(), c);
  EXPECT_EQ(s.params, run_->source);
  AdaptState n = make_adapt_state(run_->source, config(Method::kNorm));
  EXPECT_EQ(svp.mistakes, run_stream(n, stream(), config(Method::kNorm)).mistakes);
}

TEST_F(Adapt, ZeroWeightEntSvpReducesToTent) {
  AdaptConfig c = config(Method::kEntSvp);
  c.alpha1 = 0.0;
  c.alpha2 = 0.0;
  AdaptState a = make_adapt_state(run_->source, c);
  run_stream(a, stream(), c);
  AdaptState b = make_adapt_state(run_->source, config(Method::kTent));
  run_stream(b, stream(), config(Method::kTent));
  EXPECT_EQ(a.params, b.params);
}

TEST_F(Adapt, JointEqualsSequentialWithoutFirstPass) {
  AdaptConfig c = config(Method::kSvpSda);
  c.alpha1 = 0.0;
  c.alpha2 = 0.0;
  AdaptConfig joint = c;
  joint.joint = true;
  AdaptState a = make_adapt_state(run_->source, c);
  AdaptState b = make_adapt_state(run_->source, joint);
  run_stream(a, stream(), c);
  run_stream(b, stream(), joint);
  EXPECT_EQ(a, b);
}

TEST_F(Adapt, TentLowersEntropyOnARepeatedBatch) {
  const AdaptConfig c = config(Method::kTent);
  AdaptState s = make_adapt_state(run_->source, c);
  std::vector<double> entropy;
  for (int i = 0; i < 10; ++i) entropy.push_back(adapt_batch(s, batch(0), c).trace.entropy);
  for (std::size_t i = 1; i < entropy.size(); ++i) EXPECT_LT(entropy[i], entropy[i - 1]);
}

TEST_F(Adapt, EmptyStreamLeavesStateUntouched) {
  const AdaptConfig c = config(Method::kSvpSda);
  AdaptState s = make_adapt_state(run_->source, c);
  const AdaptState before = s;
  const StreamReport r = run_stream(s, {}, c);
  EXPECT_EQ(s, before);
  EXPECT_EQ(r.samples, 0u);
  EXPECT_FALSE(r.error.has_value());
  EXPECT_TRUE(r.batches.empty());
}

TEST_F(Adapt, DeterministicForEqualSeeds) {
  const AdaptConfig c = config(Method::kSvpSda);
  AdaptState a = make_adapt_state(run_->source, c);
  AdaptState b = make_adapt_state(run_->source, c);
  EXPECT_EQ(run_stream(a, stream(), c), run_stream(b, stream(), c));
  EXPECT_EQ(a, b);
  AdaptConfig other = c;
  other.seed = 4;
  AdaptState d = make_adapt_state(run_->source, other);
  run_stream(d, stream(), other);
  EXPECT_NE(a.params, d.params);
}

TEST_F(Adapt, StreamSplitAtAnyPointMatchesSingleRun) {
  const AdaptConfig c = config(Method::kSvpSda);
  AdaptState whole = make_adapt_state(run_->source, c);
  const StreamReport full = run_stream(whole, stream(), c);
  AdaptState parts = make_adapt_state(run_->source, c);
  const StreamReport head = run_stream(parts, stream().first(5), c);
  const StreamReport tail = run_stream(parts, stream().subspan(5), c);
  EXPECT_EQ(parts, whole);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(head.batches[i], full.batches[i]);
  for (std::size_t i = 5; i < full.batches.size(); ++i)
    EXPECT_EQ(tail.batches[i - 5], full.batches[i]);
}

TEST_F(Adapt, StatisticsCountEveryProcessedSample) {
  const AdaptConfig c = config(Method::kSvpSda);
  AdaptState s = make_adapt_state(run_->source, c);
  std::size_t seen = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    adapt_batch(s, batch(i), c);
    seen += batch(i).rows();
    EXPECT_EQ(s.stats.total_count(), seen);
  }
}

TEST_F(Adapt, BetaFollowsSchedule) {
  const AdaptConfig c = config(Method::kSvpSda);
  AdaptState s = make_adapt_state(run_->source, c);
  const StreamReport r = run_stream(s, stream(), c);
  for (const BatchTrace& t : r.batches) {
    ASSERT_TRUE(t.beta.has_value());
    EXPECT_DOUBLE_EQ(*t.beta, beta_schedule(t.index, c.total_batches, c.beta0, c.warmup));
    EXPECT_TRUE(t.sda.has_value());
  }
}

TEST_F(Adapt, PerCorruptionResetRestartsEachSegment) {
  // Tent draws no random numbers, so a reset segment replays a fresh run.
  AdaptConfig c = config(Method::kTent);
  c.reset_policy = ResetPolicy::kPerCorruption;
  ASSERT_GE(run_->benchmark.targets.size(), 2u);
  std::size_t first_len = 0;
  while (run_->stream[first_len].segment == run_->stream[0].segment) ++first_len;
  AdaptState a = make_adapt_state(run_->source, c);
  const StreamReport all = run_stream(a, stream(), c);
  AdaptState b = make_adapt_state(run_->source, c);
  const StreamReport second = run_stream(b, stream().subspan(first_len), c);
  for (std::size_t i = first_len; i < all.batches.size(); ++i) {
    EXPECT_EQ(all.batches[i].singular_values, second.batches[i - first_len].singular_values);
  }
  EXPECT_EQ(a.params, b.params);
  ASSERT_EQ(all.segments.size(), 2u);
  EXPECT_EQ(all.segments[1].batches, all.batches.size() - first_len);
}

TEST_F(Adapt, ReportAggregatesAreConsistent) {
  const AdaptConfig c = config(Method::kSvpSda);
  AdaptState s = make_adapt_state(run_->source, c);
  const StreamReport r = run_stream(s, stream(), c);
  double weighted = 0.0;
  std::size_t samples = 0;
  for (const BatchTrace& t : r.batches) {
    weighted += *t.error * static_cast<double>(t.size);
    samples += t.size;
  }
  EXPECT_EQ(samples, r.samples);
  EXPECT_NEAR(*r.error, weighted / static_cast<double>(samples), 1e-12);
  std::size_t seg_mistakes = 0;
  for (const SegmentSummary& seg : r.segments) seg_mistakes += seg.mistakes;
  EXPECT_EQ(seg_mistakes, r.mistakes);
}

TEST(AdaptConfig, ValidationRejectsBadValues) {
  auto bad = [](auto mutate) {
    AdaptConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](AdaptConfig& c) { c.alpha1 = -1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](AdaptConfig& c) { c.lr = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](AdaptConfig& c) { c.t_aug = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](AdaptConfig& c) { c.batch_size = 1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](AdaptConfig& c) { c.adapt_set = AdaptSet::kAll; }).validate(), ConfigError);
  EXPECT_THROW(bad([](AdaptConfig& c) { c.total_batches = 0; }).validate(), ConfigError);
  EXPECT_NO_THROW(bad([](AdaptConfig& c) {
                    c.method = Method::kSource;
                    c.batch_size = 1;
                  }).validate());
}

TEST(AdaptNames, RoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_THROW(parse_method("bogus"), ConfigError);
  EXPECT_EQ(parse_reset_policy("per_corruption"), ResetPolicy::kPerCorruption);
  EXPECT_EQ(parse_adapt_set(adapt_set_name(AdaptSet::kBnAffinePlusHead)),
            AdaptSet::kBnAffinePlusHead);
  EXPECT_THROW(parse_adapt_set("all"), ConfigError);
}

}  // namespace
}  // namespace svptta
