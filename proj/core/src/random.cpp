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

#include "svptta/random.hpp"

#include <random>

#include "svptta/error.hpp"

namespace svptta {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a, only used to turn stream names into keys.
std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed)
    : key_(mix64(seed ^ 0x5EED5EED5EED5EEDULL)), counter_(0) {}

RandomStream::result_type RandomStream::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RandomStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  // A fresh distribution per call keeps the whole state in (key, counter).
  std::normal_distribution<double> dist;
  return dist(*this);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  require(bound > 0, "RandomStream::below: bound must be positive");
  std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
  return dist(*this);
}

RandomStream RandomStream::split() {
  const std::uint64_t child = mix64((*this)() ^ key_);
  return RandomStream(child, 0);
}

RandomStream RandomStream::fork(std::string_view name) const {
  return RandomStream(mix64(key_ ^ mix64(hash_name(name))), 0);
}

}  // namespace svptta
