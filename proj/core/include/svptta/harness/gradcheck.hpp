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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "svptta/linalg.hpp"

namespace svptta {

// Central differences of f with respect to every entry of x, restoring x.
Vector central_differences(const std::function<double()>& f, std::span<double> x,
                           double step);

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

struct GradcheckOptions {
  std::size_t loss_instances = 50;
  std::size_t network_instances = 10;
  std::uint64_t seed = 0;
  double step = 1e-6;
  double loss_tolerance = 1e-5;
  double network_tolerance = 1e-4;
};

struct GradcheckCase {
  std::string name;
  std::size_t instances = 0;
  std::size_t rejected = 0;  // SVD inputs resampled for small singular gaps
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Finite-difference audit of every analytic gradient: the matrix losses and
// BN-affine gradients through a small network for entropy, SVP and SDA.
std::vector<GradcheckCase> run_gradcheck(const GradcheckOptions& options);

}  // namespace svptta
