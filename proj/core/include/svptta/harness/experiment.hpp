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
#include <string>
#include <vector>

#include "svptta/adapt.hpp"
#include "svptta/harness/benchmark.hpp"
#include "svptta/harness/dataset.hpp"
#include "svptta/model.hpp"

namespace svptta {

// Splits target datasets into an ordered stream of labeled batches, one
// segment per dataset. Batches are spread evenly across datasets (earlier
// datasets take the remainder). Unused rows are returned as `leftover`.
struct StreamSplit {
  std::vector<StreamBatch> batches;
  Dataset leftover;
};
StreamSplit make_stream(const std::vector<Dataset>& targets, std::size_t batch_size,
                        std::size_t num_batches);

// Every row of every dataset, in order, in batches of `batch_size`. A final
// partial batch of a dataset is kept when it has at least two rows.
std::vector<StreamBatch> chunk_stream(const std::vector<Dataset>& targets,
                                      std::size_t batch_size);

struct ExperimentSpec {
  BenchmarkSpec bench;
  std::vector<std::size_t> hidden = {64, 64, 32};
  // A short schedule keeps the source model from saturating its softmax,
  // which leaves entropy-based objectives almost no gradient to follow.
  TrainConfig train = {.epochs = 12};
  std::size_t batch_size = 64;
  std::size_t num_batches = 50;
  std::size_t heldout_size = 256;
};

// One seed's benchmark, trained source model and evaluation stream.
struct PreparedRun {
  std::uint64_t seed = 0;
  Benchmark benchmark;
  ModelParams source;
  double clean_error = 0.0;  // source model, running statistics, clean holdout
  std::vector<StreamBatch> stream;
  Dataset heldout;  // corrupted rows never seen by the stream
};

PreparedRun prepare_run(const ExperimentSpec& spec, std::uint64_t seed);

struct HeldoutEval {
  double error = 0.0;
  Vector per_class_error;
  double singular_value_variance = 0.0;
  Vector singular_values;
};

// Batch-statistics forward of the whole held-out set.
HeldoutEval evaluate_heldout(const ModelParams& params, const Dataset& heldout);

struct RunResult {
  StreamReport report;
  AdaptState final_state;
  HeldoutEval heldout;
};

// Adapts a fresh copy of `run.source` over `run.stream`.
RunResult run_method(const PreparedRun& run, const AdaptConfig& config);

struct Summary {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double stderr_mean = 0.0;
};
Summary summarize(const std::vector<double>& values);
// sqrt((s_a^2 + s_b^2) / 2) / sqrt(n) for equal-size samples.
double pooled_standard_error(const Summary& a, const Summary& b);

struct NamedConfig {
  std::string name;
  AdaptConfig config;
};

// Loss-term ablation arms derived from `base`.
std::vector<NamedConfig> ablation_arms(const AdaptConfig& base);

struct SweepPoint {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta0 = 0.0;
  Summary error;
};
std::vector<SweepPoint> run_sweep(const std::vector<PreparedRun>& runs,
                                  const AdaptConfig& base,
                                  const std::vector<double>& alpha1_grid,
                                  const std::vector<double>& alpha2_grid,
                                  const std::vector<double>& beta0_grid);

// Class-distance matrix of the final features plus the effect of dropping
// the smallest singular values of the prediction matrix on per-class error.
struct Diagnostics {
  Matrix class_distances;
  Matrix features;
  LabelVector labels;
  LabelVector predictions;
  // Row d: per-class error after dropping the d smallest singular values.
  Matrix truncation_per_class_error;
  Vector truncation_error;
};
Diagnostics compute_diagnostics(const ModelParams& params, const Dataset& data,
                                BnMode mode);

}  // namespace svptta
