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
#include <string>
#include <string_view>
#include <vector>

#include "svptta/harness/dataset.hpp"
#include "svptta/random.hpp"

namespace svptta {

// Input-space distribution shifts. Strength at severity s is s * base.
enum class Corruption { kAddNoise, kFeatureScale, kRotation, kMeanShift, kBlurMix };

std::string_view corruption_name(Corruption c);
Corruption parse_corruption(std::string_view name);  // throws ConfigError
// Per-operator strength at severity 1.
double corruption_base(Corruption c);

struct BenchmarkSpec {
  std::size_t num_classes = 8;
  std::size_t input_dim = 32;
  std::size_t source_per_class = 250;
  std::size_t holdout_per_class = 100;
  // Samples of the most frequent class in each target split.
  std::size_t target_per_class = 500;
  // Largest / smallest class size in target splits; 1 = balanced.
  double imbalance_ratio = 1.0;
  std::vector<std::string> corruptions = {"add_noise", "feature_scale"};
  std::vector<int> severities = {5};
  // Class means lie on a sphere of this radius (in units of the within-class
  // standard deviation), mutually orthogonal when input_dim >= num_classes.
  double class_radius = 6.0;
  double within_std = 1.0;
  // Constant added to every clean input coordinate (in within_std units),
  // like the mean intensity of image pixels.
  double input_offset = 2.0;

  void validate() const;  // throws ConfigError
};

struct Benchmark {
  Dataset source;            // labeled, balanced, clean
  Dataset holdout;           // clean held-out split
  std::vector<Dataset> targets;  // one per (corruption, severity), in spec order
};

// Target class sizes: round(target_per_class * ratio^(-j / (J - 1))).
std::vector<std::size_t> imbalance_profile(std::size_t per_class, double ratio,
                                           std::size_t num_classes);

Benchmark generate_benchmark(const BenchmarkSpec& spec, std::uint64_t seed);

// The clean samples a target split of `corruption` at any severity starts from.
Dataset clean_target_split(const BenchmarkSpec& spec, std::uint64_t seed,
                           std::string_view corruption, int severity);

}  // namespace svptta
