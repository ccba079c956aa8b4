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

#include "svptta/harness/benchmark.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "svptta/error.hpp"

namespace svptta {
namespace {

struct CorruptionInfo {
  Corruption kind;
  std::string_view name;
  double base;
};

// Strength per severity step. add_noise: noise std in within-class std units.
// feature_scale: std of per-dimension log scale. rotation: radians per plane.
// mean_shift: shift length in class-radius units. blur_mix: neighbour weight.
constexpr std::array<CorruptionInfo, 5> kCorruptions = {{
    {Corruption::kAddNoise, "add_noise", 0.2},
    {Corruption::kFeatureScale, "feature_scale", 0.25},
    {Corruption::kRotation, "rotation", 0.1},
    {Corruption::kMeanShift, "mean_shift", 0.12},
    {Corruption::kBlurMix, "blur_mix", 0.15},
}};

const CorruptionInfo& info(Corruption c) {
  for (const auto& i : kCorruptions)
    if (i.kind == c) return i;
  throw ConfigError("unknown corruption");
}

// Inverse standard normal CDF by bisection on erfc.
double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Random points on the sphere. When there is room, the means are mutually
// orthogonal so every pair of classes is equally far apart.
Matrix class_means(const BenchmarkSpec& spec, RandomStream rng) {
  const std::size_t width = spec.input_dim;
  const bool orthogonal = width >= spec.num_classes;
  Matrix means(spec.num_classes, spec.input_dim);
  for (std::size_t j = 0; j < spec.num_classes; ++j) {
    auto row = means.row(j);
    for (double& x : row) x = rng.normal();
    if (orthogonal) {
      for (std::size_t k = 0; k < j; ++k) {
        const auto prev = means.row(k);
        double d = 0.0;
        for (std::size_t a = 0; a < width; ++a) d += row[a] * prev[a];
        for (std::size_t a = 0; a < width; ++a) row[a] -= d * prev[a];
      }
    }
    double norm = 0.0;
    for (double x : row) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : row) x /= norm;
  }
  for (double& x : means.data()) x *= spec.class_radius * spec.within_std;
  return means;
}

// Draws counts[j] samples of class j, then shuffles the rows.
Dataset sample_classes(const BenchmarkSpec& spec, const Matrix& means,
                       const std::vector<std::size_t>& counts, RandomStream rng) {
  const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  LabelVector labels;
  labels.reserve(n);
  for (std::size_t j = 0; j < counts.size(); ++j)
    labels.insert(labels.end(), counts[j], static_cast<Label>(j));
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

  Matrix x(n, spec.input_dim);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    const auto mu = means.row(labels[r]);
    for (std::size_t a = 0; a < row.size(); ++a)
      row[a] = spec.input_offset * spec.within_std + mu[a] + spec.within_std * rng.normal();
  }
  Dataset d;
  d.features = std::move(x);
  d.labels = std::move(labels);
  d.meta.num_classes = spec.num_classes;
  return d;
}

void apply_corruption(Corruption kind, int severity, const BenchmarkSpec& spec,
                      Matrix& x, RandomStream op_rng, RandomStream noise_rng) {
  const double strength = info(kind).base * static_cast<double>(severity);
  const std::size_t dim = x.cols();
  switch (kind) {
    case Corruption::kAddNoise: {
      const double sd = strength * spec.within_std;
      for (double& v : x.data()) v += sd * noise_rng.normal();
      break;
    }
    case Corruption::kFeatureScale: {
      // Log-scales at evenly spaced normal quantiles, in random order, so every
      // seed sees the same spread of contrast changes.
      Vector scale(dim);
      for (std::size_t a = 0; a < dim; ++a) {
        const double q = (static_cast<double>(a) + 0.5) / static_cast<double>(dim);
        scale[a] = std::exp(strength * normal_quantile(q));
      }
      for (std::size_t i = dim; i > 1; --i) std::swap(scale[i - 1], scale[op_rng.below(i)]);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t a = 0; a < dim; ++a) row[a] *= scale[a];
      }
      break;
    }
    case Corruption::kRotation: {
      // Givens rotations in disjoint planes of a random pairing.
      std::vector<std::size_t> perm(dim);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t i = dim; i > 1; --i) std::swap(perm[i - 1], perm[op_rng.below(i)]);
      const double c = std::cos(strength);
      const double s = std::sin(strength);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t p = 0; p + 1 < dim; p += 2) {
          const double a = row[perm[p]];
          const double b = row[perm[p + 1]];
          row[perm[p]] = c * a - s * b;
          row[perm[p + 1]] = s * a + c * b;
        }
      }
      break;
    }
    case Corruption::kMeanShift: {
      Vector dir(dim);
      double norm = 0.0;
      for (double& v : dir) {
        v = op_rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
      const double length = strength * spec.class_radius * spec.within_std;
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t a = 0; a < dim; ++a) row[a] += length * dir[a] / norm;
      }
      break;
    }
    case Corruption::kBlurMix: {
      const double w = std::min(strength, 1.0);
      Vector tmp(dim);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t a = 0; a < dim; ++a) {
          const double left = row[(a + dim - 1) % dim];
          const double right = row[(a + 1) % dim];
          tmp[a] = (1.0 - w) * row[a] + 0.5 * w * (left + right);
        }
        std::copy(tmp.begin(), tmp.end(), row.begin());
      }
      break;
    }
  }
}

std::string target_key(std::string_view corruption, int severity) {
  return "target/" + std::string(corruption) + "/" + std::to_string(severity);
}

}  // namespace

std::string_view corruption_name(Corruption c) { return info(c).name; }

Corruption parse_corruption(std::string_view name) {
  for (const auto& i : kCorruptions)
    if (i.name == name) return i.kind;
  throw ConfigError("unknown corruption '" + std::string(name) + "'");
}

double corruption_base(Corruption c) { return info(c).base; }

void BenchmarkSpec::validate() const {
  if (num_classes < 2) throw ConfigError("benchmark needs at least 2 classes");
  if (input_dim < 2) throw ConfigError("benchmark input_dim must be >= 2");
  if (source_per_class == 0 || holdout_per_class == 0 || target_per_class == 0)
    throw ConfigError("benchmark split sizes must be positive");
  if (!(imbalance_ratio >= 1.0)) throw ConfigError("imbalance_ratio must be >= 1");
  if (!(class_radius > 0.0) || !(within_std > 0.0))
    throw ConfigError("class_radius and within_std must be positive");
  if (!std::isfinite(input_offset)) throw ConfigError("input_offset must be finite");
  if (severities.empty()) throw ConfigError("benchmark needs at least one severity");
  for (int s : severities)
    if (s < 0 || s > 5) throw ConfigError("severity must be in 0..5");
  for (const auto& c : corruptions) parse_corruption(c);
}

std::vector<std::size_t> imbalance_profile(std::size_t per_class, double ratio,
                                           std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes);
  for (std::size_t j = 0; j < num_classes; ++j) {
    const double exponent =
        num_classes > 1 ? -static_cast<double>(j) / static_cast<double>(num_classes - 1)
                        : 0.0;
    counts[j] = static_cast<std::size_t>(
        std::llround(static_cast<double>(per_class) * std::pow(ratio, exponent)));
  }
  return counts;
}

Dataset clean_target_split(const BenchmarkSpec& spec, std::uint64_t seed,
                           std::string_view corruption, int severity) {
  const RandomStream root(seed);
  const Matrix means = class_means(spec, root.fork("means"));
  Dataset d = sample_classes(
      spec, means,
      imbalance_profile(spec.target_per_class, spec.imbalance_ratio, spec.num_classes),
      root.fork(target_key(corruption, severity)));
  d.meta.seed = seed;
  return d;
}

Benchmark generate_benchmark(const BenchmarkSpec& spec, std::uint64_t seed) {
  spec.validate();
  const RandomStream root(seed);
  const Matrix means = class_means(spec, root.fork("means"));

  Benchmark b;
  b.source = sample_classes(spec, means,
                            std::vector<std::size_t>(spec.num_classes, spec.source_per_class),
                            root.fork("source"));
  b.source.meta = {"clean", 0, seed, spec.num_classes};
  b.holdout = sample_classes(
      spec, means, std::vector<std::size_t>(spec.num_classes, spec.holdout_per_class),
      root.fork("holdout"));
  b.holdout.meta = {"clean", 0, seed, spec.num_classes};

  for (const std::string& name : spec.corruptions) {
    const Corruption kind = parse_corruption(name);
    for (int severity : spec.severities) {
      Dataset d = clean_target_split(spec, seed, name, severity);
      apply_corruption(kind, severity, spec, d.features, root.fork("op/" + name),
                       root.fork("noise/" + target_key(name, severity)));
      d.meta = {name, severity, seed, spec.num_classes};
      b.targets.push_back(std::move(d));
    }
  }
  return b;
}

}  // namespace svptta
