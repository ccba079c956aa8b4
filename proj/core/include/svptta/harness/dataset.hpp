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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svptta/linalg.hpp"

namespace svptta {

struct DatasetMeta {
  std::string corruption = "clean";
  int severity = 0;  // 0 = clean, 1..5
  std::uint64_t seed = 0;
  std::size_t num_classes = 0;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Dataset {
  Matrix features;  // n x input_dim
  std::optional<LabelVector> labels;
  DatasetMeta meta;

  std::size_t size() const noexcept { return features.rows(); }
  // Throws ContractViolation on label/severity invariant violations.
  void validate() const;
  // Labels or a ConfigError explaining that scoring needs them.
  const LabelVector& require_labels(std::string_view purpose) const;
};

// Little-endian "TTAD" container: u32 version, u32 flags (bit0 = labels),
// u32 n, u32 dim, u32 classes, f32 features, u32 labels, then a u32-length
// prefixed UTF-8 JSON metadata block.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;
inline constexpr std::uint32_t kDatasetFlagLabels = 1u << 0;

std::vector<std::uint8_t> encode_dataset(const Dataset& d);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace svptta
