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

#include "svptta/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "svptta/error.hpp"
#include "svptta/losses.hpp"

namespace svptta {

void ModelParams::validate() const {
  require(arch.input_dim > 0 && arch.num_classes > 0,
          "ModelParams: empty architecture");
  require(arch.bn_eps > 0.0, "ModelParams: bn_eps must be positive");
  require(layers.size() == arch.hidden.size(),
          "ModelParams: layer count != architecture");
  std::size_t in = arch.input_dim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const HiddenLayer& layer = layers[l];
    const std::size_t out = arch.hidden[l];
    require(layer.weight.rows() == out && layer.weight.cols() == in,
            "ModelParams: weight shape mismatch");
    require(layer.bias.size() == out && layer.gamma.size() == out &&
                layer.beta.size() == out && layer.running_mean.size() == out &&
                layer.running_var.size() == out,
            "ModelParams: per-channel vector length mismatch");
    for (double v : layer.running_var)
      require(v > 0.0, "ModelParams: running variance must be positive");
    in = out;
  }
  require(head_weight.rows() == arch.num_classes && head_weight.cols() == in,
          "ModelParams: head weight shape mismatch");
  require(head_bias.size() == arch.num_classes,
          "ModelParams: head bias length mismatch");
}

ModelParams init_params(const Architecture& arch, RandomStream& rng) {
  require(arch.input_dim > 0 && arch.num_classes > 0,
          "init_params: empty architecture");
  ModelParams p;
  p.arch = arch;
  std::size_t in = arch.input_dim;
  for (std::size_t out : arch.hidden) {
    HiddenLayer layer;
    layer.weight = Matrix(out, in);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (double& w : layer.weight.data()) w = scale * rng.normal();
    layer.bias.assign(out, 0.0);
    layer.gamma.assign(out, 1.0);
    layer.beta.assign(out, 0.0);
    layer.running_mean.assign(out, 0.0);
    layer.running_var.assign(out, 1.0);
    p.layers.push_back(std::move(layer));
    in = out;
  }
  p.head_weight = Matrix(arch.num_classes, in);
  const double scale = std::sqrt(1.0 / static_cast<double>(in));
  for (double& w : p.head_weight.data()) w = scale * rng.normal();
  p.head_bias.assign(arch.num_classes, 0.0);
  return p;
}

namespace {

void add_bias(Matrix& m, const Vector& bias) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
}

Vector column_sums(const Matrix& m) {
  Vector out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c];
  }
  return out;
}

}  // namespace

ForwardCache forward(const ModelParams& params, const Matrix& inputs, BnMode mode) {
  require(inputs.cols() == params.arch.input_dim,
          "forward: input width != architecture input_dim");
  require(inputs.rows() >= 1, "forward: empty batch");
  require(mode != BnMode::kBatch || inputs.rows() >= 2,
          "forward: batch-statistics mode needs at least 2 rows");
  const std::size_t k = inputs.rows();
  const double kd = static_cast<double>(k);

  ForwardCache cache;
  cache.mode = mode;
  cache.layers.reserve(params.layers.size());
  const Matrix* x = &inputs;
  for (const HiddenLayer& layer : params.layers) {
    LayerCache lc;
    lc.input = *x;
    lc.pre_bn = matmul_nt(*x, layer.weight);
    add_bias(lc.pre_bn, layer.bias);
    const std::size_t out = layer.weight.rows();

    if (mode == BnMode::kBatch) {
      lc.mean = column_sums(lc.pre_bn);
      for (double& m : lc.mean) m /= kd;
      lc.var.assign(out, 0.0);
      for (std::size_t r = 0; r < k; ++r) {
        const auto row = lc.pre_bn.row(r);
        for (std::size_t c = 0; c < out; ++c) {
          const double d = row[c] - lc.mean[c];
          lc.var[c] += d * d;
        }
      }
      for (double& v : lc.var) v /= kd;
    } else {
      lc.mean = layer.running_mean;
      lc.var = layer.running_var;
    }
    lc.inv_std.resize(out);
    for (std::size_t c = 0; c < out; ++c)
      lc.inv_std[c] = 1.0 / std::sqrt(lc.var[c] + params.arch.bn_eps);

    lc.normalized = Matrix(k, out);
    lc.output = Matrix(k, out);
    for (std::size_t r = 0; r < k; ++r) {
      const auto z = lc.pre_bn.row(r);
      auto xh = lc.normalized.row(r);
      auto y = lc.output.row(r);
      for (std::size_t c = 0; c < out; ++c) {
        xh[c] = (z[c] - lc.mean[c]) * lc.inv_std[c];
        y[c] = std::max(0.0, layer.gamma[c] * xh[c] + layer.beta[c]);
      }
    }
    cache.layers.push_back(std::move(lc));
    x = &cache.layers.back().output;
  }
  cache.features = *x;
  cache.logits = matmul_nt(cache.features, params.head_weight);
  add_bias(cache.logits, params.head_bias);
  cache.probabilities = softmax_rows(cache.logits);
  return cache;
}

Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Matrix& grad_logits, AdaptSet set) {
  return backward(params, cache, grad_logits, Matrix(), set);
}

Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Matrix& grad_logits, const Matrix& grad_features,
                   AdaptSet set) {
  const std::size_t k = cache.features.rows();
  const std::size_t feat = cache.features.cols();
  require(grad_logits.empty() || (grad_logits.rows() == k &&
                                  grad_logits.cols() == params.arch.num_classes),
          "backward: grad_logits shape != logits shape");
  require(grad_features.empty() ||
              (grad_features.rows() == k && grad_features.cols() == feat),
          "backward: grad_features shape != features shape");
  require(cache.layers.size() == params.layers.size(),
          "backward: cache does not match parameters");

  Gradients g;
  g.set = set;
  g.layers.resize(params.layers.size());

  Matrix upstream = grad_features.empty() ? Matrix(k, feat) : grad_features;
  if (!grad_logits.empty()) upstream += matmul(grad_logits, params.head_weight);
  if (set != AdaptSet::kBnAffine) {
    if (grad_logits.empty()) {
      g.head_weight = Matrix(params.arch.num_classes, feat);
      g.head_bias = Vector(params.arch.num_classes, 0.0);
    } else {
      g.head_weight = matmul_tn(grad_logits, cache.features);
      g.head_bias = column_sums(grad_logits);
    }
  }

  const double kd = static_cast<double>(k);
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const HiddenLayer& layer = params.layers[li];
    const LayerCache& lc = cache.layers[li];
    const std::size_t out = layer.weight.rows();
    LayerGrads& lg = g.layers[li];
    lg.gamma.assign(out, 0.0);
    lg.beta.assign(out, 0.0);

    // dY = dOut * relu'(y); reuse `upstream` in place.
    for (std::size_t r = 0; r < k; ++r) {
      auto d = upstream.row(r);
      const auto y = lc.output.row(r);
      const auto xh = lc.normalized.row(r);
      for (std::size_t c = 0; c < out; ++c) {
        if (y[c] <= 0.0) d[c] = 0.0;
        lg.gamma[c] += d[c] * xh[c];
        lg.beta[c] += d[c];
      }
    }

    const bool need_input_grad = li > 0;
    const bool need_weight_grad = set == AdaptSet::kAll;
    if (!need_input_grad && !need_weight_grad) break;

    // dZ from dX-hat = dY * gamma.
    Matrix dz(k, out);
    if (cache.mode == BnMode::kBatch) {
      Vector sum_dxh(out, 0.0);
      Vector sum_dxh_xh(out, 0.0);
      for (std::size_t r = 0; r < k; ++r) {
        const auto d = upstream.row(r);
        const auto xh = lc.normalized.row(r);
        for (std::size_t c = 0; c < out; ++c) {
          const double dxh = d[c] * layer.gamma[c];
          sum_dxh[c] += dxh;
          sum_dxh_xh[c] += dxh * xh[c];
        }
      }
      for (std::size_t r = 0; r < k; ++r) {
        const auto d = upstream.row(r);
        const auto xh = lc.normalized.row(r);
        auto dzr = dz.row(r);
        for (std::size_t c = 0; c < out; ++c) {
          const double dxh = d[c] * layer.gamma[c];
          dzr[c] = lc.inv_std[c] / kd *
                   (kd * dxh - sum_dxh[c] - xh[c] * sum_dxh_xh[c]);
        }
      }
    } else {
      for (std::size_t r = 0; r < k; ++r) {
        const auto d = upstream.row(r);
        auto dzr = dz.row(r);
        for (std::size_t c = 0; c < out; ++c)
          dzr[c] = d[c] * layer.gamma[c] * lc.inv_std[c];
      }
    }

    if (need_weight_grad) {
      lg.weight = matmul_tn(dz, lc.input);
      lg.bias = column_sums(dz);
    }
    if (need_input_grad) upstream = matmul(dz, layer.weight);
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  require(set == other.set && layers.size() == other.layers.size(),
          "Gradients +=: incompatible bundles");
  auto add = [](Vector& a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LayerGrads& a = layers[l];
    const LayerGrads& b = other.layers[l];
    add(a.gamma, b.gamma);
    add(a.beta, b.beta);
    if (a.weight && b.weight) *a.weight += *b.weight;
    if (a.bias && b.bias) add(*a.bias, *b.bias);
  }
  if (head_weight && other.head_weight) *head_weight += *other.head_weight;
  if (head_bias && other.head_bias) add(*head_bias, *other.head_bias);
  return *this;
}

std::vector<std::span<const double>> Gradients::tensors() const {
  std::vector<std::span<const double>> out;
  for (const LayerGrads& l : layers) {
    if (set == AdaptSet::kAll) {
      require(l.weight.has_value() && l.bias.has_value(),
              "Gradients: missing weight gradients for kAll");
      out.emplace_back(l.weight->data());
      out.emplace_back(*l.bias);
    }
    out.emplace_back(l.gamma);
    out.emplace_back(l.beta);
  }
  if (set != AdaptSet::kBnAffine) {
    require(head_weight.has_value() && head_bias.has_value(),
            "Gradients: missing head gradients");
    out.emplace_back(head_weight->data());
    out.emplace_back(*head_bias);
  }
  return out;
}

namespace {

template <typename Params, typename Span>
std::vector<Span> collect_tensors(Params& params, AdaptSet set) {
  std::vector<Span> out;
  for (auto& l : params.layers) {
    if (set == AdaptSet::kAll) {
      out.emplace_back(l.weight.data());
      out.emplace_back(l.bias);
    }
    out.emplace_back(l.gamma);
    out.emplace_back(l.beta);
  }
  if (set != AdaptSet::kBnAffine) {
    out.emplace_back(params.head_weight.data());
    out.emplace_back(params.head_bias);
  }
  return out;
}

}  // namespace

std::vector<std::span<double>> adaptable_tensors(ModelParams& params, AdaptSet set) {
  return collect_tensors<ModelParams, std::span<double>>(params, set);
}

AdamState AdamState::for_params(const ModelParams& params, AdaptSet set, double lr) {
  AdamState s;
  s.lr = lr;
  s.set = set;
  for (auto t : collect_tensors<const ModelParams, std::span<const double>>(params, set)) {
    s.first_moment.emplace_back(t.size(), 0.0);
    s.second_moment.emplace_back(t.size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, ModelParams& params, const Gradients& grads) {
  require(grads.set == state.set, "adam_step: gradient set != optimizer set");
  auto targets = adaptable_tensors(params, state.set);
  const auto sources = grads.tensors();
  require(targets.size() == sources.size() &&
              targets.size() == state.first_moment.size(),
          "adam_step: tensor count mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto theta = targets[i];
    const auto g = sources[i];
    Vector& m = state.first_moment[i];
    Vector& v = state.second_moment[i];
    require(theta.size() == g.size() && theta.size() == m.size(),
            "adam_step: tensor shape mismatch");
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double grad = g[j] + state.weight_decay * theta[j];
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * grad;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * grad * grad;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      theta[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

ModelParams train_source(const Architecture& arch, SourceDataset data,
                         const TrainConfig& config, RandomStream& rng) {
  require(data.features.rows() == data.labels.size(),
          "train_source: label count != sample count");
  require(data.features.cols() == arch.input_dim,
          "train_source: input width != architecture input_dim");
  require(config.batch_size >= 2, "train_source: batch size must be >= 2");
  RandomStream init_rng = rng.split();
  ModelParams params = init_params(arch, init_rng);
  AdamState opt = AdamState::for_params(params, AdaptSet::kAll, config.lr);

  const std::size_t n = data.features.rows();
  const std::size_t dim = arch.input_dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start + 2 <= n; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - start);
      if (count < 2) break;
      Matrix x(count, dim);
      LabelVector y(count);
      for (std::size_t r = 0; r < count; ++r) {
        const std::size_t src = order[start + r];
        const auto row = data.features.row(src);
        std::copy(row.begin(), row.end(), x.row(r).begin());
        y[r] = data.labels[src];
      }
      ForwardCache cache = forward(params, x, BnMode::kBatch);
      LossValueGrad ce = cross_entropy_loss(cache.logits, y);
      if (!std::isfinite(ce.value)) {
        std::ostringstream msg;
        msg << "train_source: loss diverged in epoch " << epoch;
        throw TrainingError(msg.str(), epoch);
      }
      const Gradients g = backward(params, cache, ce.grad, AdaptSet::kAll);
      adam_step(opt, params, g);

      const double m = config.bn_momentum;
      const double unbias = static_cast<double>(count) / static_cast<double>(count - 1);
      for (std::size_t l = 0; l < params.layers.size(); ++l) {
        HiddenLayer& layer = params.layers[l];
        const LayerCache& lc = cache.layers[l];
        for (std::size_t c = 0; c < layer.running_mean.size(); ++c) {
          layer.running_mean[c] = (1.0 - m) * layer.running_mean[c] + m * lc.mean[c];
          layer.running_var[c] =
              (1.0 - m) * layer.running_var[c] + m * lc.var[c] * unbias;
        }
      }
    }
    for (const HiddenLayer& layer : params.layers) {
      for (double w : layer.weight.data()) {
        if (!std::isfinite(w)) {
          std::ostringstream msg;
          msg << "train_source: non-finite weight after epoch " << epoch;
          throw TrainingError(msg.str(), epoch);
        }
      }
    }
  }
  return params;
}

}  // namespace svptta
