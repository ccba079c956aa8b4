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

#include <cmath>

#include <nlohmann/json.hpp>

#include "svptta/error.hpp"
#include "svptta/harness/dataset.hpp"
#include "svptta/io.hpp"

namespace svptta {

void Dataset::validate() const {
  require(meta.severity >= 0 && meta.severity <= 5,
          "Dataset: severity must be in 0..5");
  if (labels) {
    require(labels->size() == features.rows(), "Dataset: label count != rows");
    for (Label y : *labels)
      require(y < meta.num_classes, "Dataset: label out of range");
  }
}

const LabelVector& Dataset::require_labels(std::string_view purpose) const {
  if (!labels) {
    throw ConfigError("dataset '" + meta.corruption + "' has no labels; " +
                      std::string(purpose) + " requires a labeled dataset");
  }
  return *labels;
}

std::vector<std::uint8_t> encode_dataset(const Dataset& d) {
  d.validate();
  ByteWriter w;
  w.text("TTAD");
  w.u32(kDatasetFormatVersion);
  w.u32(d.labels ? kDatasetFlagLabels : 0u);
  w.u32(static_cast<std::uint32_t>(d.features.rows()));
  w.u32(static_cast<std::uint32_t>(d.features.cols()));
  w.u32(static_cast<std::uint32_t>(d.meta.num_classes));
  for (double x : d.features.data()) w.f32(static_cast<float>(x));
  if (d.labels)
    for (Label y : *d.labels) w.u32(y);
  const nlohmann::ordered_json meta = {{"corruption", d.meta.corruption},
                                       {"severity", d.meta.severity},
                                       {"seed", d.meta.seed}};
  const std::string text = meta.dump();
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.text(text);
  return w.release();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("TTAD");
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kDatasetFormatVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version) +
                          " at byte offset " + std::to_string(version_at),
                      version_at);
  }
  const std::size_t flags_at = r.offset();
  const std::uint32_t flags = r.u32();
  if ((flags & ~kDatasetFlagLabels) != 0) {
    throw FormatError("unknown dataset flags at byte offset " + std::to_string(flags_at),
                      flags_at);
  }
  const std::size_t n = r.u32();
  const std::size_t dim = r.u32();
  const std::size_t classes = r.u32();
  const std::size_t payload = n * dim * 4 + ((flags & kDatasetFlagLabels) ? n * 4 : 0);
  if (r.remaining() < payload) {
    throw FormatError("truncated dataset payload at byte offset " +
                          std::to_string(r.offset()),
                      r.offset());
  }

  Dataset d;
  d.meta.num_classes = classes;
  std::vector<double> values(n * dim);
  for (double& x : values) {
    const std::size_t at = r.offset();
    x = r.f32();
    if (!std::isfinite(x))
      throw FormatError("non-finite feature at byte offset " + std::to_string(at), at);
  }
  d.features = Matrix(n, dim, std::move(values));
  if (flags & kDatasetFlagLabels) {
    LabelVector labels(n);
    for (Label& y : labels) {
      const std::size_t at = r.offset();
      y = r.u32();
      if (y >= classes)
        throw FormatError("label out of range at byte offset " + std::to_string(at), at);
    }
    d.labels = std::move(labels);
  }
  const std::uint32_t meta_len = r.u32();
  const std::size_t meta_at = r.offset();
  const std::string text = r.text(meta_len);
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes at byte offset " + std::to_string(r.offset()),
                      r.offset());
  }
  try {
    const auto meta = nlohmann::json::parse(text);
    d.meta.corruption = meta.at("corruption").get<std::string>();
    d.meta.severity = meta.at("severity").get<int>();
    d.meta.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad metadata block at byte offset " + std::to_string(meta_at) +
                          ": " + e.what(),
                      meta_at);
  }
  if (d.meta.severity < 0 || d.meta.severity > 5)
    throw FormatError("severity out of range in metadata at byte offset " +
                          std::to_string(meta_at),
                      meta_at);
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  write_file_atomic(path, encode_dataset(d));
}

Dataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(read_file(path));
}

}  // namespace svptta
