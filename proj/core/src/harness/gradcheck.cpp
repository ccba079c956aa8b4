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

#include "svptta/harness/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "svptta/augment.hpp"
#include "svptta/losses.hpp"
#include "svptta/model.hpp"
#include "svptta/random.hpp"
#include "svptta/stats.hpp"

namespace svptta {

Vector central_differences(const std::function<double()>& f, std::span<double> x,
                           double step) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = f();
    x[i] = saved - step;
    const double down = f();
    x[i] = saved;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double scale = std::sqrt(std::max(na, nn));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, RandomStream& rng,
                     double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = scale * rng.normal();
  return m;
}

bool well_separated(const Vector& sigma) {
  if (sigma.back() <= 1e-3) return false;
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i)
    if (sigma[i] - sigma[i + 1] <= 1e-3) return false;
  return true;
}

// Row-stochastic matrix with well-separated singular values.
Matrix separated_probabilities(std::size_t rows, std::size_t cols, RandomStream& rng,
                               std::size_t& rejected) {
  for (;;) {
    Matrix p = softmax_rows(random_matrix(rows, cols, rng, 2.0));
    if (well_separated(svd(p).sigma)) return p;
    ++rejected;
  }
}

GradcheckCase matrix_loss_case(const std::string& name,
                               const std::function<LossValueGrad(const Matrix&)>& loss,
                               std::size_t rows, std::size_t cols, bool probabilities,
                               bool separated, double tolerance,
                               const GradcheckOptions& opt, RandomStream rng) {
  GradcheckCase c{name, opt.loss_instances, 0, 0.0, tolerance, false};
  for (std::size_t i = 0; i < opt.loss_instances; ++i) {
    Matrix x = separated ? separated_probabilities(rows, cols, rng, c.rejected)
               : probabilities ? softmax_rows(random_matrix(rows, cols, rng))
                               : random_matrix(rows, cols, rng, 2.0);
    const LossValueGrad analytic = loss(x);
    const Vector numeric =
        central_differences([&] { return loss(x).value; }, x.data(), opt.step);
    c.max_relative_error =
        std::max(c.max_relative_error, relative_error(analytic.grad.data(), numeric));
  }
  c.passed = c.max_relative_error <= tolerance;
  return c;
}

GradcheckCase cross_entropy_case(const GradcheckOptions& opt, RandomStream rng) {
  GradcheckCase c{"cross_entropy_loss", opt.loss_instances, 0, 0.0,
                  opt.loss_tolerance * 0.1, false};
  for (std::size_t i = 0; i < opt.loss_instances; ++i) {
    Matrix logits = random_matrix(10, 5, rng, 2.0);
    LabelVector labels(10);
    for (Label& y : labels) y = static_cast<Label>(rng.below(5));
    const LossValueGrad analytic = cross_entropy_loss(logits, labels);
    const Vector numeric = central_differences(
        [&] { return cross_entropy_loss(logits, labels).value; }, logits.data(), opt.step);
    c.max_relative_error =
        std::max(c.max_relative_error, relative_error(analytic.grad.data(), numeric));
  }
  c.passed = c.max_relative_error <= c.tolerance;
  return c;
}

GradcheckCase sda_case(const GradcheckOptions& opt, RandomStream rng) {
  GradcheckCase c{"sda_loss", opt.loss_instances, 0, 0.0, opt.loss_tolerance, false};
  const std::size_t k = 6, t = 3, dim = 5, classes = 4;
  for (std::size_t i = 0; i < opt.loss_instances; ++i) {
    AugmentedBatch aug;
    aug.copies = t;
    aug.features = random_matrix(k * t, dim, rng);
    for (std::size_t r = 0; r < k * t; ++r) {
      aug.source_index.push_back(r / t);
      aug.labels.push_back(static_cast<Label>((r / t) % classes));
    }
    Matrix w = random_matrix(classes, dim, rng);
    Vector b(classes);
    for (double& x : b) x = rng.normal();
    const SdaLoss analytic = sda_loss(aug, w, b);
    auto value = [&] { return sda_loss(aug, w, b).value; };
    const Vector gf = central_differences(value, aug.features.data(), opt.step);
    const Vector gw = central_differences(value, w.data(), opt.step);
    const Vector gb = central_differences(value, b, opt.step);
    c.max_relative_error = std::max(
        {c.max_relative_error, relative_error(analytic.grad_features.data(), gf),
         relative_error(analytic.grad_weights.data(), gw),
         relative_error(analytic.grad_bias, gb)});
  }
  c.passed = c.max_relative_error <= c.tolerance;
  return c;
}

ModelParams random_network(RandomStream& rng) {
  Architecture arch;
  arch.input_dim = 6;
  arch.hidden = {10, 8, 6};
  arch.num_classes = 4;
  arch.bn_eps = 1e-5;
  ModelParams p = init_params(arch, rng);
  for (HiddenLayer& l : p.layers) {
    for (double& g : l.gamma) g = 0.5 + rng.uniform();
    for (double& b : l.beta) b = 0.4 * rng.uniform() - 0.2;
  }
  return p;
}

// Every gamma and beta entry, in declaration order.
Vector flatten_affine(const Gradients& g) {
  Vector out;
  for (const LayerGrads& l : g.layers) {
    out.insert(out.end(), l.gamma.begin(), l.gamma.end());
    out.insert(out.end(), l.beta.begin(), l.beta.end());
  }
  return out;
}

Vector numeric_affine(ModelParams& p, const std::function<double()>& f, double step) {
  Vector out;
  for (HiddenLayer& l : p.layers) {
    const Vector g = central_differences(f, l.gamma, step);
    const Vector b = central_differences(f, l.beta, step);
    out.insert(out.end(), g.begin(), g.end());
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

enum class NetworkLoss { kEntropy, kSvp, kSda };

GradcheckCase network_case(NetworkLoss which, const GradcheckOptions& opt,
                           RandomStream rng) {
  static const char* names[] = {"network_entropy", "network_svp", "network_sda"};
  GradcheckCase c{names[static_cast<int>(which)], opt.network_instances, 0, 0.0,
                  opt.network_tolerance, false};
  for (std::size_t i = 0; i < opt.network_instances; ++i) {
    ModelParams p = random_network(rng);
    const Matrix x = random_matrix(16, p.arch.input_dim, rng);
    const ForwardCache cache = forward(p, x, BnMode::kBatch);

    Gradients analytic;
    std::function<double()> value;
    Matrix delta;
    LabelVector labels;
    std::size_t copies = 3;
    switch (which) {
      case NetworkLoss::kEntropy: {
        const LossValueGrad l = entropy_loss(cache.probabilities);
        analytic = backward(p, cache, softmax_backward(cache.probabilities, l.grad),
                            AdaptSet::kBnAffine);
        value = [&] { return entropy_loss(forward(p, x, BnMode::kBatch).probabilities).value; };
        break;
      }
      case NetworkLoss::kSvp: {
        const LossValueGrad l = svp_loss(cache.probabilities, 1.0, 0.3);
        analytic = backward(p, cache, softmax_backward(cache.probabilities, l.grad),
                            AdaptSet::kBnAffine);
        value = [&] {
          return svp_loss(forward(p, x, BnMode::kBatch).probabilities, 1.0, 0.3).value;
        };
        break;
      }
      case NetworkLoss::kSda: {
        labels = argmax_rows(cache.probabilities);
        ClassStats stats = ClassStats::empty(p.arch.num_classes, p.arch.feature_dim());
        merge_into(stats, batch_moments(cache.features, labels, p.arch.num_classes));
        const AugmentedBatch aug =
            augment_features(cache.features, labels, stats, 0.5, copies, 2, rng);
        // Hold the sampled perturbations fixed while the features move.
        delta = aug.features;
        for (std::size_t r = 0; r < delta.rows(); ++r) {
          const auto f = cache.features.row(aug.source_index[r]);
          auto d = delta.row(r);
          for (std::size_t a = 0; a < d.size(); ++a) d[a] -= f[a];
        }
        const SdaLoss l = sda_loss(aug, p.head_weight, p.head_bias);
        analytic = backward(p, cache, Matrix(), fold_augmented_gradient(aug, l.grad_features),
                            AdaptSet::kBnAffine);
        value = [&, aug] {
          AugmentedBatch moved = aug;
          const Matrix f = forward(p, x, BnMode::kBatch).features;
          for (std::size_t r = 0; r < moved.features.rows(); ++r) {
            const auto src = f.row(moved.source_index[r]);
            auto dst = moved.features.row(r);
            const auto d = delta.row(r);
            for (std::size_t a = 0; a < dst.size(); ++a) dst[a] = src[a] + d[a];
          }
          return sda_loss(moved, p.head_weight, p.head_bias).value;
        };
        break;
      }
    }
    const Vector numeric = numeric_affine(p, value, opt.step);
    c.max_relative_error =
        std::max(c.max_relative_error, relative_error(flatten_affine(analytic), numeric));
  }
  c.passed = c.max_relative_error <= c.tolerance;
  return c;
}

}  // namespace

std::vector<GradcheckCase> run_gradcheck(const GradcheckOptions& opt) {
  const RandomStream root(opt.seed);
  std::vector<GradcheckCase> out;
  out.push_back(matrix_loss_case("svd_sum_loss", [](const Matrix& p) { return svd_sum_loss(p); },
                                 8, 4, true, true, opt.loss_tolerance, opt,
                                 root.fork("svd_sum")));
  out.push_back(matrix_loss_case("svd_var_loss", [](const Matrix& p) { return svd_var_loss(p); },
                                 8, 4, true, true, opt.loss_tolerance, opt,
                                 root.fork("svd_var")));
  out.push_back(matrix_loss_case(
      "svp_loss", [](const Matrix& p) { return svp_loss(p, 1.0, 0.3); }, 8, 4, true, true,
      opt.loss_tolerance, opt, root.fork("svp")));
  out.push_back(matrix_loss_case("entropy_loss",
                                 [](const Matrix& p) { return entropy_loss(p); }, 6, 4, true,
                                 false, opt.loss_tolerance * 0.1, opt, root.fork("entropy")));
  out.push_back(cross_entropy_case(opt, root.fork("cross_entropy")));
  out.push_back(sda_case(opt, root.fork("sda")));
  out.push_back(network_case(NetworkLoss::kEntropy, opt, root.fork("net_entropy")));
  out.push_back(network_case(NetworkLoss::kSvp, opt, root.fork("net_svp")));
  out.push_back(network_case(NetworkLoss::kSda, opt, root.fork("net_sda")));
  return out;
}

}  // namespace svptta
