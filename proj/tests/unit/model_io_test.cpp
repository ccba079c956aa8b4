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

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "svptta/error.hpp"
#include "svptta/io.hpp"
#include "svptta/model.hpp"

namespace svptta {
namespace {

ModelParams sample_model() {
  Architecture a;
  a.input_dim = 4;
  a.hidden = {5, 3};
  a.num_classes = 3;
  RandomStream rng(7);
  ModelParams p = init_params(a, rng);
  p.layers[1].running_var[2] = 0.123456789012345;
  p.head_bias[0] = -1e-300;
  return p;
}

TEST(ModelIo, EncodeDecodeRoundTripIsExact) {
  const ModelParams p = sample_model();
  const auto bytes = encode_model(p);
  EXPECT_EQ(decode_model(bytes), p);
  EXPECT_EQ(encode_model(decode_model(bytes)), bytes);
}

TEST(ModelIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "svptta_model_io_test.svpm";
  const ModelParams p = sample_model();
  save_model(p, path);
  EXPECT_EQ(load_model(path), p);
  std::filesystem::remove(path);
}

TEST(ModelIo, HeaderLayout) {
  const auto bytes = encode_model(sample_model());
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SVPM");
  EXPECT_EQ(bytes[4], kModelFormatVersion);
  EXPECT_EQ(bytes[5], 0);
}

TEST(ModelIo, EveryTruncationIsFormatError) {
  const auto bytes = encode_model(sample_model());
  for (std::size_t n = 0; n < bytes.size(); n += 7) {
    const std::span<const std::uint8_t> prefix(bytes.data(), n);
    try {
      decode_model(prefix);
      ADD_FAILURE() << "prefix of " << n << " bytes decoded";
    } catch (const FormatError& e) {
      EXPECT_LE(e.offset(), n);
    }
  }
}

TEST(ModelIo, BadMagicReportsOffsetZero) {
  auto bytes = encode_model(sample_model());
  bytes[0] = 'X';
  try {
    decode_model(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(ModelIo, UnknownVersionReportsItsOffset) {
  auto bytes = encode_model(sample_model());
  bytes[4] = 99;
  try {
    decode_model(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos);
  }
}

TEST(ModelIo, TrailingBytesAreRejected) {
  auto bytes = encode_model(sample_model());
  bytes.push_back(0);
  EXPECT_THROW(decode_model(bytes), FormatError);
}

TEST(ModelIo, NonPositiveRunningVarianceIsRejected) {
  ModelParams p = sample_model();
  auto bytes = encode_model(p);
  // Overwrite the last f64 of layer 0's running variance with -1.
  const std::size_t header = 4 + 4 + 4 + 4 + 2 * 4 + 4 + 8;
  const std::size_t layer0 = (5 * 4 + 5 * 5) * 8;
  const double minus_one = -1.0;
  std::memcpy(bytes.data() + header + layer0 - 8, &minus_one, 8);
  EXPECT_THROW(decode_model(bytes), FormatError);
}

TEST(ModelIo, MissingFileIsIoError) {
  EXPECT_THROW(load_model("/nonexistent/svptta/model.svpm"), IoError);
}

}  // namespace
}  // namespace svptta
