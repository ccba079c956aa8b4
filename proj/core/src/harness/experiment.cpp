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

#include "svptta/harness/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "svptta/error.hpp"
#include "svptta/harness/metrics.hpp"
#include "svptta/losses.hpp"

namespace svptta {
namespace {

Matrix gather_rows(const Matrix& m, std::size_t begin, std::size_t count) {
  Matrix out(count, m.cols());
  std::copy(m.data().begin() + static_cast<std::ptrdiff_t>(begin * m.cols()),
            m.data().begin() + static_cast<std::ptrdiff_t>((begin + count) * m.cols()),
            out.data().begin());
  return out;
}

}  // namespace

StreamSplit make_stream(const std::vector<Dataset>& targets, std::size_t batch_size,
                        std::size_t num_batches) {
  if (targets.empty()) throw ConfigError("make_stream: no target datasets");
  if (batch_size < 1) throw ConfigError("make_stream: batch_size must be positive");
  StreamSplit split;
  const std::size_t dim = targets.front().features.cols();
  std::vector<double> left_x;
  LabelVector left_y;
  bool all_labeled = true;

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Dataset& d = targets[t];
    if (d.features.cols() != dim) throw ConfigError("make_stream: input widths differ");
    const std::size_t share = num_batches / targets.size() +
                              (t < num_batches % targets.size() ? 1 : 0);
    if (share * batch_size > d.size()) {
      throw ConfigError("make_stream: dataset '" + d.meta.corruption + "' has " +
                        std::to_string(d.size()) + " rows, stream needs " +
                        std::to_string(share * batch_size));
    }
    const std::string segment =
        d.meta.corruption + "/" + std::to_string(d.meta.severity);
    for (std::size_t b = 0; b < share; ++b) {
      StreamBatch batch;
      batch.inputs = gather_rows(d.features, b * batch_size, batch_size);
      if (d.labels) {
        batch.labels = LabelVector(d.labels->begin() + static_cast<std::ptrdiff_t>(b * batch_size),
                                   d.labels->begin() + static_cast<std::ptrdiff_t>((b + 1) * batch_size));
      }
      batch.segment = segment;
      split.batches.push_back(std::move(batch));
    }
    for (std::size_t r = share * batch_size; r < d.size(); ++r) {
      const auto row = d.features.row(r);
      left_x.insert(left_x.end(), row.begin(), row.end());
      if (d.labels) left_y.push_back((*d.labels)[r]);
    }
    all_labeled = all_labeled && d.labels.has_value();
  }
  const std::size_t n_left = left_x.size() / dim;
  split.leftover.features = Matrix(n_left, dim, std::move(left_x));
  if (all_labeled) split.leftover.labels = std::move(left_y);
  split.leftover.meta = targets.front().meta;
  split.leftover.meta.corruption = "heldout";
  return split;
}

std::vector<StreamBatch> chunk_stream(const std::vector<Dataset>& targets,
                                      std::size_t batch_size) {
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  std::vector<StreamBatch> out;
  for (const Dataset& d : targets) {
    const std::string segment =
        d.meta.corruption + "/" + std::to_string(d.meta.severity);
    for (std::size_t begin = 0; begin + 2 <= d.size(); begin += batch_size) {
      const std::size_t count = std::min(batch_size, d.size() - begin);
      StreamBatch batch;
      batch.inputs = gather_rows(d.features, begin, count);
      if (d.labels) {
        batch.labels = LabelVector(d.labels->begin() + static_cast<std::ptrdiff_t>(begin),
                                   d.labels->begin() + static_cast<std::ptrdiff_t>(begin + count));
      }
      batch.segment = segment;
      out.push_back(std::move(batch));
    }
  }
  return out;
}

PreparedRun prepare_run(const ExperimentSpec& spec, std::uint64_t seed) {
  PreparedRun run;
  run.seed = seed;
  run.benchmark = generate_benchmark(spec.bench, seed);

  Architecture arch;
  arch.input_dim = spec.bench.input_dim;
  arch.hidden = spec.hidden;
  arch.num_classes = spec.bench.num_classes;
  RandomStream train_rng = RandomStream(seed).fork("train");
  run.source = train_source(arch,
                            {run.benchmark.source.features, *run.benchmark.source.labels},
                            spec.train, train_rng);

  const ForwardCache clean = forward(run.source, run.benchmark.holdout.features,
                                     BnMode::kRunning);
  run.clean_error = evaluate(argmax_rows(clean.probabilities),
                             *run.benchmark.holdout.labels, arch.num_classes)
                        .error;

  StreamSplit split = make_stream(run.benchmark.targets, spec.batch_size, spec.num_batches);
  run.stream = std::move(split.batches);
  // Spread the held-out rows across segments by striding through leftovers.
  const Dataset& left = split.leftover;
  const std::size_t take = std::min(spec.heldout_size, left.size());
  if (take < 2) throw ConfigError("prepare_run: not enough rows left for a held-out set");
  const std::size_t stride = left.size() / take;
  Matrix hx(take, left.features.cols());
  LabelVector hy(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto row = left.features.row(i * stride);
    std::copy(row.begin(), row.end(), hx.row(i).begin());
    hy[i] = (*left.labels)[i * stride];
  }
  run.heldout.features = std::move(hx);
  run.heldout.labels = std::move(hy);
  run.heldout.meta = left.meta;
  return run;
}

HeldoutEval evaluate_heldout(const ModelParams& params, const Dataset& heldout) {
  const LabelVector& truth = heldout.require_labels("held-out evaluation");
  const ForwardCache cache = forward(params, heldout.features, BnMode::kBatch);
  const Metrics m = evaluate(argmax_rows(cache.probabilities), truth,
                             params.arch.num_classes);
  HeldoutEval out;
  out.error = m.error;
  out.per_class_error = m.per_class_error;
  const SvdResult s = svd(cache.probabilities);
  out.singular_values = s.sigma;
  out.singular_value_variance = svd_var_loss(s).value;
  return out;
}

RunResult run_method(const PreparedRun& run, const AdaptConfig& config) {
  RunResult out;
  out.final_state = make_adapt_state(run.source, config);
  out.report = run_stream(out.final_state, run.stream, config);
  out.heldout = evaluate_heldout(out.final_state.params, run.heldout);
  return out;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.values = values;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
    s.stderr_mean = s.stddev / std::sqrt(n);
  }
  return s;
}

double pooled_standard_error(const Summary& a, const Summary& b) {
  const double n = static_cast<double>(std::max<std::size_t>(1, a.values.size()));
  return std::sqrt((a.stddev * a.stddev + b.stddev * b.stddev) / 2.0) / std::sqrt(n);
}

std::vector<NamedConfig> ablation_arms(const AdaptConfig& base) {
  auto with = [&](Method m, double alpha2) {
    AdaptConfig c = base;
    c.method = m;
    c.alpha2 = alpha2;
    return c;
  };
  return {
      {"ent", with(Method::kTent, base.alpha2)},
      {"ent+ent", with(Method::kTentTwice, base.alpha2)},
      {"svd", with(Method::kSvpOnly, 0.0)},
      {"svd+var", with(Method::kSvpOnly, base.alpha2)},
      {"ent+svd+var", with(Method::kEntSvp, base.alpha2)},
      {"sda", with(Method::kSdaOnly, base.alpha2)},
      {"ent+sda", with(Method::kEntSda, base.alpha2)},
      {"svd+var+sda", with(Method::kSvpSda, base.alpha2)},
  };
}

std::vector<SweepPoint> run_sweep(const std::vector<PreparedRun>& runs,
                                  const AdaptConfig& base,
                                  const std::vector<double>& alpha1_grid,
                                  const std::vector<double>& alpha2_grid,
                                  const std::vector<double>& beta0_grid) {
  std::vector<SweepPoint> out;
  for (double a1 : alpha1_grid) {
    for (double a2 : alpha2_grid) {
      for (double b0 : beta0_grid) {
        AdaptConfig c = base;
        c.alpha1 = a1;
        c.alpha2 = a2;
        c.beta0 = b0;
        std::vector<double> errors;
        for (const PreparedRun& run : runs) {
          c.seed = run.seed;
          errors.push_back(run_method(run, c).report.error.value_or(0.0));
        }
        out.push_back({a1, a2, b0, summarize(errors)});
      }
    }
  }
  return out;
}

Diagnostics compute_diagnostics(const ModelParams& params, const Dataset& data,
                                BnMode mode) {
  const LabelVector& truth = data.require_labels("diagnostics");
  const std::size_t classes = params.arch.num_classes;
  const ForwardCache cache = forward(params, data.features, mode);
  Diagnostics d;
  d.features = cache.features;
  d.labels = truth;
  d.predictions = argmax_rows(cache.probabilities);
  d.class_distances = class_distance_matrix(cache.features, truth, classes).distances;

  const std::size_t n_sv = std::min(cache.probabilities.rows(), classes);
  d.truncation_per_class_error = Matrix(n_sv, classes);
  d.truncation_error.resize(n_sv);
  for (std::size_t drop = 0; drop < n_sv; ++drop) {
    const Metrics m =
        evaluate(truncated_prediction(cache.probabilities, drop), truth, classes);
    d.truncation_error[drop] = m.error;
    std::copy(m.per_class_error.begin(), m.per_class_error.end(),
              d.truncation_per_class_error.row(drop).begin());
  }
  return d;
}

}  // namespace svptta
