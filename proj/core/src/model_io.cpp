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

#include <sstream>

#include "svptta/error.hpp"
#include "svptta/io.hpp"
#include "svptta/model.hpp"

namespace svptta {
namespace {

constexpr std::string_view kMagic = "SVPM";

void put_tensor(ByteWriter& w, std::span<const double> values) {
  for (double v : values) w.f64(v);
}

Vector get_vector(ByteReader& r, std::size_t n) {
  if (n > r.remaining() / 8) {
    throw FormatError("truncated tensor block at byte offset " +
                          std::to_string(r.offset()),
                      r.offset());
  }
  Vector out(n);
  for (double& v : out) v = r.f64();
  return out;
}

Matrix get_matrix(ByteReader& r, std::size_t rows, std::size_t cols) {
  const std::size_t at = r.offset();
  Vector data = get_vector(r, rows * cols);
  try {
    return Matrix(rows, cols, std::move(data));
  } catch (const ContractViolation&) {
    throw FormatError("non-finite tensor value in block at byte offset " +
                          std::to_string(at),
                      at);
  }
}

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelParams& params) {
  params.validate();
  ByteWriter w;
  w.text(kMagic);
  w.u32(kModelFormatVersion);
  const Architecture& a = params.arch;
  w.u32(static_cast<std::uint32_t>(a.input_dim));
  w.u32(static_cast<std::uint32_t>(a.hidden.size()));
  for (std::size_t h : a.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(a.num_classes));
  w.f64(a.bn_eps);
  for (const HiddenLayer& l : params.layers) {
    put_tensor(w, l.weight.data());
    put_tensor(w, l.bias);
    put_tensor(w, l.gamma);
    put_tensor(w, l.beta);
    put_tensor(w, l.running_mean);
    put_tensor(w, l.running_var);
  }
  put_tensor(w, params.head_weight.data());
  put_tensor(w, params.head_bias);
  return w.release();
}

ModelParams decode_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(kMagic);
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) +
                          " at byte offset " + std::to_string(version_at),
                      version_at);
  }
  ModelParams p;
  p.arch.input_dim = r.u32();
  const std::size_t depth_at = r.offset();
  const std::uint32_t depth = r.u32();
  if (depth > 1024)
    throw FormatError("implausible hidden layer count at byte offset " +
                          std::to_string(depth_at),
                      depth_at);
  p.arch.hidden.resize(depth);
  for (auto& h : p.arch.hidden) h = r.u32();
  p.arch.num_classes = r.u32();
  p.arch.bn_eps = r.f64();

  std::size_t in = p.arch.input_dim;
  for (std::size_t out : p.arch.hidden) {
    HiddenLayer l;
    l.weight = get_matrix(r, out, in);
    l.bias = get_vector(r, out);
    l.gamma = get_vector(r, out);
    l.beta = get_vector(r, out);
    l.running_mean = get_vector(r, out);
    l.running_var = get_vector(r, out);
    p.layers.push_back(std::move(l));
    in = out;
  }
  p.head_weight = get_matrix(r, p.arch.num_classes, in);
  p.head_bias = get_vector(r, p.arch.num_classes);
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes after model tensors at byte offset " +
                          std::to_string(r.offset()),
                      r.offset());
  }
  try {
    p.validate();
  } catch (const ContractViolation& e) {
    throw FormatError(std::string("inconsistent model checkpoint: ") + e.what(),
                      r.offset());
  }
  return p;
}

void save_model(const ModelParams& params, const std::filesystem::path& path) {
  write_file_atomic(path, encode_model(params));
}

ModelParams load_model(const std::filesystem::path& path) {
  return decode_model(read_file(path));
}

}  // namespace svptta
