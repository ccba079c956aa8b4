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

#include "svptta/harness/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "svptta/error.hpp"
#include "test_support.hpp"

namespace svptta {
namespace {

ModelParams tiny_model() {
  Architecture a;
  a.input_dim = 3;
  a.hidden = {4};
  a.num_classes = 3;
  RandomStream rng(1);
  return init_params(a, rng);
}

std::vector<StreamBatch> tiny_stream() {
  std::vector<StreamBatch> out;
  for (int b = 0; b < 4; ++b) {
    StreamBatch s;
    s.inputs = testing::random_matrix(6, 3, 10 + b);
    s.labels = LabelVector{0, 1, 2, 0, 1, 2};
    s.segment = b < 2 ? "a/1" : "b/1";
    out.push_back(std::move(s));
  }
  return out;
}

TEST(Report, AggregatesAreConsistentWithBatches) {
  AdaptConfig c;
  c.total_batches = 4;
  AdaptState s = make_adapt_state(tiny_model(), c);
  const StreamReport r = run_stream(s, tiny_stream(), c);
  const Json j = to_json(r);
  EXPECT_EQ(j["schema"], kReportSchema);
  double weighted = 0.0;
  std::size_t total = 0;
  for (const auto& b : j["batches"]) {
    weighted += b["error"].get<double>() * b["size"].get<double>();
    total += b["size"].get<std::size_t>();
  }
  EXPECT_EQ(j["aggregate"]["samples"].get<std::size_t>(), total);
  EXPECT_NEAR(j["aggregate"]["error"].get<double>(), weighted / static_cast<double>(total),
              1e-12);
  ASSERT_EQ(j["segments"].size(), 2u);
  EXPECT_EQ(j["segments"][0]["name"], "a/1");
  EXPECT_EQ(j["segments"][1]["batches"], 2);
  EXPECT_EQ(j["config"]["method"], "svp_sda");
}

TEST(Report, DumpIsByteStable) {
  AdaptConfig c;
  AdaptState a = make_adapt_state(tiny_model(), c), b = make_adapt_state(tiny_model(), c);
  EXPECT_EQ(dump_document(to_json(run_stream(a, tiny_stream(), c))),
            dump_document(to_json(run_stream(b, tiny_stream(), c))));
}

TEST(Report, NonFiniteValuesBecomeNull) {
  StreamReport r;
  r.per_class_error = {0.5, std::numeric_limits<double>::quiet_NaN()};
  r.error = std::numeric_limits<double>::infinity();
  const Json j = to_json(r);
  EXPECT_TRUE(j["aggregate"]["per_class_error"][1].is_null());
  EXPECT_TRUE(j["aggregate"]["error"].is_null());
  EXPECT_EQ(j["aggregate"]["per_class_error"][0], 0.5);
  EXPECT_NO_THROW(Json::parse(dump_document(j)));
}

TEST(Report, WallClockOnlyWhenMeasured) {
  StreamReport r;
  EXPECT_FALSE(to_json(r).contains("wall_clock_seconds"));
  r.wall_clock_seconds = 1.5;
  EXPECT_EQ(to_json(r)["wall_clock_seconds"], 1.5);
}

TEST(Report, AdaptConfigRoundTrip) {
  AdaptConfig c;
  c.method = Method::kEntSda;
  c.alpha2 = 0.125;
  c.total_batches = 17;
  c.reset_policy = ResetPolicy::kPerCorruption;
  c.adapt_set = AdaptSet::kBnAffinePlusHead;
  c.joint = true;
  c.seed = 1234567890123ull;
  EXPECT_EQ(adapt_config_from_json(Json::parse(to_json(c).dump())), c);
  Json broken = to_json(c);
  broken.erase("lr");
  EXPECT_THROW(adapt_config_from_json(broken), FormatError);
}

TEST(Report, CheckpointRoundTripIsExact) {
  AdaptConfig c;
  c.total_batches = 4;
  AdaptState s = make_adapt_state(tiny_model(), c);
  const auto stream = tiny_stream();
  run_stream(s, std::span(stream).first(2), c);
  AdaptConfig back_config;
  const AdaptState back =
      checkpoint_from_json(Json::parse(dump_document(checkpoint_to_json(s, c))), &back_config);
  EXPECT_EQ(back, s);
  EXPECT_EQ(back_config, c);

  // Resuming from the checkpoint continues the run exactly.
  AdaptState resumed = back;
  const StreamReport tail = run_stream(resumed, std::span(stream).subspan(2), c);
  const StreamReport direct = run_stream(s, std::span(stream).subspan(2), c);
  EXPECT_EQ(tail, direct);
  EXPECT_EQ(resumed, s);
}

TEST(Report, CheckpointWithWrongSchemaIsFormatError) {
  AdaptConfig c;
  Json j = checkpoint_to_json(make_adapt_state(tiny_model(), c), c);
  j["schema"] = "something/else";
  EXPECT_THROW(checkpoint_from_json(j), FormatError);
}

TEST(Report, MatrixJsonRoundTrip) {
  const Matrix m = testing::random_matrix(3, 4, 5);
  EXPECT_EQ(matrix_from_json(Json::parse(to_json(m).dump())), m);
}

TEST(Report, DocumentFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "svptta_report_test.json";
  const Json doc = {{"schema", kReportSchema}, {"x", 1.25}};
  write_document(path, doc);
  EXPECT_EQ(read_document(path), doc);
  std::filesystem::remove(path);
  EXPECT_THROW(read_document(path), IoError);
}

}  // namespace
}  // namespace svptta
