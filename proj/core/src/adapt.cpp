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

#include "svptta/adapt.hpp"

#include <array>
#include <limits>
#include <utility>

#include "svptta/augment.hpp"
#include "svptta/error.hpp"
#include "svptta/harness/metrics.hpp"
#include "svptta/losses.hpp"

namespace svptta {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> kMethodNames = {{
    {Method::kSource, "source"},
    {Method::kNorm, "norm"},
    {Method::kTent, "tent"},
    {Method::kTentTwice, "tent2"},
    {Method::kSvpOnly, "svp_only"},
    {Method::kEntSvp, "ent_svp"},
    {Method::kSdaOnly, "sda_only"},
    {Method::kEntSda, "ent_sda"},
    {Method::kSvpSda, "svp_sda"},
}};

enum class SecondPass { kNone, kSda, kEntropy };

struct Plan {
  bool batch_bn = true;
  bool entropy = false;  // entropy term in pass 1
  bool svp = false;      // singular-value term in pass 1
  SecondPass second = SecondPass::kNone;
};

Plan plan_for(Method m) {
  switch (m) {
    case Method::kSource: return {false, false, false, SecondPass::kNone};
    case Method::kNorm: return {true, false, false, SecondPass::kNone};
    case Method::kTent: return {true, true, false, SecondPass::kNone};
    case Method::kTentTwice: return {true, true, false, SecondPass::kEntropy};
    case Method::kSvpOnly: return {true, false, true, SecondPass::kNone};
    case Method::kEntSvp: return {true, true, true, SecondPass::kNone};
    case Method::kSdaOnly: return {true, false, false, SecondPass::kSda};
    case Method::kEntSda: return {true, true, false, SecondPass::kSda};
    case Method::kSvpSda: return {true, false, true, SecondPass::kSda};
  }
  throw ConfigError("unknown method");
}

bool uses_optimizer(Method m) { return m != Method::kSource && m != Method::kNorm; }

struct SdaStep {
  Gradients grads;
  double value = 0.0;
  double beta = 0.0;
  std::size_t fallback_classes = 0;
};

// Statistics merge, augmentation and the augmented cross-entropy gradient for
// the features in `cache`, keyed by `pseudo_labels`.
SdaStep sda_step(AdaptState& state, const ForwardCache& cache,
                 const LabelVector& pseudo_labels, const AdaptConfig& config) {
  const std::size_t classes = state.params.arch.num_classes;
  merge_into(state.stats, batch_moments(cache.features, pseudo_labels, classes));
  SdaStep out;
  out.beta = beta_schedule(state.batch_counter, config.total_batches, config.beta0,
                           config.warmup);
  const AugmentedBatch aug =
      augment_features(cache.features, pseudo_labels, state.stats, out.beta,
                       config.t_aug, config.min_count, state.rng);
  out.fallback_classes = aug.fallback_classes.size();
  SdaLoss loss = sda_loss(aug, state.params.head_weight, state.params.head_bias);
  out.value = loss.value;
  const Matrix grad_features = fold_augmented_gradient(aug, loss.grad_features);
  out.grads = backward(state.params, cache, Matrix(), grad_features, config.adapt_set);
  if (out.grads.head_weight) {
    *out.grads.head_weight += loss.grad_weights;
    for (std::size_t j = 0; j < loss.grad_bias.size(); ++j)
      (*out.grads.head_bias)[j] += loss.grad_bias[j];
  }
  return out;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [method, known] : kMethodNames)
    if (known == name) return method;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& entry : kMethodNames) out.push_back(entry.first);
  return out;
}

std::string_view reset_policy_name(ResetPolicy p) {
  return p == ResetPolicy::kNever ? "never" : "per_corruption";
}

ResetPolicy parse_reset_policy(std::string_view name) {
  if (name == "never") return ResetPolicy::kNever;
  if (name == "per_corruption") return ResetPolicy::kPerCorruption;
  throw ConfigError("unknown reset policy '" + std::string(name) + "'");
}

std::string_view adapt_set_name(AdaptSet s) {
  switch (s) {
    case AdaptSet::kBnAffine: return "bn_affine";
    case AdaptSet::kBnAffinePlusHead: return "bn_affine_plus_head";
    case AdaptSet::kAll: return "all";
  }
  return "unknown";
}

AdaptSet parse_adapt_set(std::string_view name) {
  if (name == "bn_affine") return AdaptSet::kBnAffine;
  if (name == "bn_affine_plus_head") return AdaptSet::kBnAffinePlusHead;
  throw ConfigError("unknown adapt set '" + std::string(name) + "'");
}

void AdaptConfig::validate() const {
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0) || !(beta0 >= 0.0))
    throw ConfigError("alpha1, alpha2 and beta0 must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (t_aug < 1) throw ConfigError("t_aug must be >= 1");
  if (warmup < 1) throw ConfigError("warmup must be >= 1");
  if (method != Method::kSource && batch_size < 2)
    throw ConfigError("batch_size must be >= 2 for batch-statistics methods");
  if (adapt_set == AdaptSet::kAll)
    throw ConfigError("adapt_set 'all' is reserved for source training");
  if (total_batches && *total_batches == 0)
    throw ConfigError("total_batches must be positive when given");
}

AdaptState make_adapt_state(ModelParams params, const AdaptConfig& config) {
  config.validate();
  params.validate();
  AdaptState state;
  state.opt = AdamState::for_params(params, config.adapt_set, config.lr);
  state.stats = ClassStats::empty(params.arch.num_classes, params.arch.feature_dim());
  state.rng = RandomStream(config.seed).fork("adapt");
  state.params = std::move(params);
  return state;
}

BatchOutcome adapt_batch(AdaptState& state, const Matrix& batch,
                         const AdaptConfig& config) {
  const Plan plan = plan_for(config.method);
  require(!plan.batch_bn || batch.rows() >= 2,
          "adapt_batch: batch-statistics methods need at least 2 rows");
  require(state.opt.set == config.adapt_set,
          "adapt_batch: optimizer state does not match adapt_set");
  ++state.batch_counter;

  BatchOutcome out;
  BatchTrace& trace = out.trace;
  trace.index = state.batch_counter;
  trace.size = batch.rows();

  const ForwardCache first =
      forward(state.params, batch, plan.batch_bn ? BnMode::kBatch : BnMode::kRunning);
  out.predictions = argmax_rows(first.probabilities);
  const SvdResult spectrum = svd(first.probabilities);
  trace.singular_values = spectrum.sigma;
  const LossValueGrad ent = entropy_loss(first.probabilities);
  trace.entropy = ent.value;
  const LossValueGrad sum = svd_sum_loss(spectrum);
  const LossValueGrad var = svd_var_loss(spectrum);
  trace.svd_sum = sum.value;
  trace.svd_var = var.value;

  if (!uses_optimizer(config.method)) return out;

  // Pass 1: objective on the prediction matrix.
  const bool svp_active = plan.svp && (config.alpha1 > 0.0 || config.alpha2 > 0.0);
  const bool first_active = plan.entropy || svp_active;
  std::optional<Gradients> first_grads;
  if (first_active) {
    Matrix grad_probs(first.probabilities.rows(), first.probabilities.cols());
    if (plan.entropy) grad_probs += ent.grad;
    if (svp_active) {
      grad_probs += config.alpha1 * sum.grad;
      grad_probs += config.alpha2 * var.grad;
    }
    const Matrix grad_logits = softmax_backward(first.probabilities, grad_probs);
    first_grads = backward(state.params, first, grad_logits, config.adapt_set);
  }

  if (plan.second == SecondPass::kSda && config.joint) {
    SdaStep sda = sda_step(state, first, out.predictions, config);
    if (first_grads) sda.grads += *first_grads;
    adam_step(state.opt, state.params, sda.grads);
    trace.sda = sda.value;
    trace.beta = sda.beta;
    trace.fallback_classes = sda.fallback_classes;
    return out;
  }

  if (first_grads) adam_step(state.opt, state.params, *first_grads);

  switch (plan.second) {
    case SecondPass::kNone:
      break;
    case SecondPass::kSda: {
      const ForwardCache second =
          first_active ? forward(state.params, batch, BnMode::kBatch) : first;
      const SdaStep sda = sda_step(state, second, out.predictions, config);
      adam_step(state.opt, state.params, sda.grads);
      trace.sda = sda.value;
      trace.beta = sda.beta;
      trace.fallback_classes = sda.fallback_classes;
      break;
    }
    case SecondPass::kEntropy: {
      const ForwardCache second = forward(state.params, batch, BnMode::kBatch);
      const LossValueGrad ent2 = entropy_loss(second.probabilities);
      const Matrix grad_logits = softmax_backward(second.probabilities, ent2.grad);
      adam_step(state.opt, state.params,
                backward(state.params, second, grad_logits, config.adapt_set));
      trace.entropy_second = ent2.value;
      break;
    }
  }
  return out;
}

StreamReport run_stream(AdaptState& state, std::span<const StreamBatch> batches,
                        const AdaptConfig& config) {
  config.validate();
  const std::size_t classes = state.params.arch.num_classes;
  StreamReport report;
  report.config = config;
  report.num_classes = classes;
  report.confusion.assign(classes, std::vector<Count>(classes, 0));

  const AdaptState entry = state;
  for (std::size_t i = 0; i < batches.size(); ++i) {
    const StreamBatch& b = batches[i];
    const bool new_segment =
        report.segments.empty() || report.segments.back().name != b.segment;
    if (new_segment) {
      if (i > 0 && config.reset_policy == ResetPolicy::kPerCorruption) {
        RandomStream rng = state.rng;
        state = entry;
        state.rng = rng;
      }
      SegmentSummary fresh;
      fresh.name = b.segment;
      report.segments.push_back(std::move(fresh));
    }
    BatchOutcome outcome = adapt_batch(state, b.inputs, config);
    outcome.trace.segment = b.segment;
    SegmentSummary& seg = report.segments.back();
    ++seg.batches;
    seg.samples += b.inputs.rows();
    report.samples += b.inputs.rows();
    if (b.labels) {
      const Metrics m = evaluate(outcome.predictions, *b.labels, classes);
      outcome.trace.error = m.error;
      seg.labeled += m.count;
      seg.mistakes += m.mistakes;
      report.labeled += m.count;
      report.mistakes += m.mistakes;
      for (std::size_t t = 0; t < classes; ++t)
        for (std::size_t p = 0; p < classes; ++p) report.confusion[t][p] += m.confusion[t][p];
    }
    report.batches.push_back(std::move(outcome.trace));
  }

  for (SegmentSummary& seg : report.segments) {
    if (seg.labeled > 0)
      seg.error = static_cast<double>(seg.mistakes) / static_cast<double>(seg.labeled);
  }
  if (report.labeled > 0) {
    report.error =
        static_cast<double>(report.mistakes) / static_cast<double>(report.labeled);
    report.per_class_error.resize(classes);
    for (std::size_t t = 0; t < classes; ++t) {
      Count total = 0;
      for (Count c : report.confusion[t]) total += c;
      report.per_class_error[t] =
          total == 0 ? std::numeric_limits<double>::quiet_NaN()
                     : 1.0 - static_cast<double>(report.confusion[t][t]) /
                                 static_cast<double>(total);
    }
  }
  return report;
}

}  // namespace svptta
