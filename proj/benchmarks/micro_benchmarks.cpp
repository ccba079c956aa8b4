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

#include <benchmark/benchmark.h>

#include "svptta/adapt.hpp"
#include "svptta/linalg.hpp"
#include "svptta/losses.hpp"
#include "svptta/model.hpp"

namespace {

using namespace svptta;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  RandomStream rng(seed);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

ModelParams model(std::size_t input_dim, std::size_t classes) {
  Architecture a;
  a.input_dim = input_dim;
  a.num_classes = classes;
  RandomStream rng(1);
  return init_params(a, rng);
}

// Prediction-matrix shapes: batch x classes.
void BM_Svd(benchmark::State& state) {
  const Matrix m = softmax_rows(random_matrix(state.range(0), state.range(1), 2));
  for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_Svd)->Args({64, 10})->Args({128, 10})->Args({64, 100})->Args({200, 64});

void BM_SvpLoss(benchmark::State& state) {
  const Matrix p = softmax_rows(random_matrix(state.range(0), state.range(1), 3));
  for (auto _ : state) benchmark::DoNotOptimize(svp_loss(p, 1.0, 0.3));
}
BENCHMARK(BM_SvpLoss)->Args({64, 10})->Args({64, 100});

void BM_ForwardBackward(benchmark::State& state) {
  const ModelParams p = model(32, 8);
  const Matrix x = random_matrix(state.range(0), 32, 4);
  const Matrix seed = random_matrix(state.range(0), 8, 5);
  for (auto _ : state) {
    const ForwardCache c = forward(p, x, BnMode::kBatch);
    benchmark::DoNotOptimize(backward(p, c, seed, AdaptSet::kBnAffine));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256);

void BM_AdaptBatch(benchmark::State& state) {
  AdaptConfig c;
  c.method = static_cast<Method>(state.range(0));
  AdaptState s = make_adapt_state(model(32, 8), c);
  const Matrix x = random_matrix(64, 32, 6);
  for (auto _ : state) benchmark::DoNotOptimize(adapt_batch(s, x, c));
  state.SetLabel(std::string(method_name(c.method)));
}
BENCHMARK(BM_AdaptBatch)
    ->Arg(static_cast<int>(Method::kNorm))
    ->Arg(static_cast<int>(Method::kTent))
    ->Arg(static_cast<int>(Method::kSvpSda));

}  // namespace

BENCHMARK_MAIN();
