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

#include <cstdint>
#include <limits>
#include <string_view>

namespace svptta {

// Seedable, splittable counter-based generator. Each output is a SplitMix64
// finalizer applied to key + counter * golden-gamma, so the full state is the
// (key, counter) pair and streams can be checkpointed and forked cheaply.
//
// Exact sequences are stable within one build; normal draws go through
// std::normal_distribution whose algorithm is implementation-defined.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream() : RandomStream(0) {}
  explicit RandomStream(std::uint64_t seed);
  RandomStream(std::uint64_t key, std::uint64_t counter)
      : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform in [0, 1).
  double uniform();
  double normal();
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  // Independent child stream; the parent advances by one draw.
  RandomStream split();
  // Child stream derived from a name, leaving the parent untouched.
  RandomStream fork(std::string_view name) const;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace svptta
