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

#include "svptta/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "svptta/error.hpp"

namespace svptta {

namespace {

template <typename Uint>
void put_le(std::vector<std::uint8_t>& buf, Uint v) {
  for (std::size_t i = 0; i < sizeof(Uint); ++i)
    buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename Uint>
Uint get_le(const std::uint8_t* p) {
  Uint v = 0;
  for (std::size_t i = 0; i < sizeof(Uint); ++i)
    v |= static_cast<Uint>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void ByteWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::f32(float v) { put_le(buf_, std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(std::span<const std::uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
}

void ByteWriter::text(std::string_view s) {
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteReader::need(std::size_t n, const char* what) {
  if (remaining() < n) {
    std::ostringstream msg;
    msg << "truncated input at byte offset " << pos_ << " while reading " << what
        << " (" << n << " bytes needed, " << remaining() << " left)";
    throw FormatError(msg.str(), pos_);
  }
}

std::uint32_t ByteReader::u32() {
  need(4, "u32");
  const auto v = get_le<std::uint32_t>(data_.data() + pos_);
  pos_ += 4;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() {
  need(8, "f64");
  const auto v = get_le<std::uint64_t>(data_.data() + pos_);
  pos_ += 8;
  return std::bit_cast<double>(v);
}

std::string ByteReader::text(std::size_t length) {
  need(length, "text");
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), length);
  pos_ += length;
  return s;
}

void ByteReader::expect_magic(std::string_view magic) {
  const std::size_t at = pos_;
  need(magic.size(), "magic");
  if (std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0) {
    std::ostringstream msg;
    msg << "bad magic at byte offset " << at << ", expected \"" << magic << "\"";
    throw FormatError(msg.str(), at);
  }
  pos_ += magic.size();
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

}  // namespace svptta
