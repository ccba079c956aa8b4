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

#include "svptta/losses.hpp"

#include <algorithm>
#include <cmath>

#include "svptta/error.hpp"

namespace svptta {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto in = logits.row(r);
    auto row = out.row(r);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      row[c] = std::exp(in[c] - peak);
      total += row[c];
    }
    for (double& x : row) x /= total;
  }
  return out;
}

Matrix softmax_backward(const Matrix& probabilities, const Matrix& grad_probs) {
  require(probabilities.rows() == grad_probs.rows() &&
              probabilities.cols() == grad_probs.cols(),
          "softmax_backward: shape mismatch");
  Matrix out(probabilities.rows(), probabilities.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto p = probabilities.row(r);
    const auto g = grad_probs.row(r);
    const double inner = dot(p, g);
    auto o = out.row(r);
    for (std::size_t c = 0; c < o.size(); ++c) o[c] = p[c] * (g[c] - inner);
  }
  return out;
}

namespace {

// sum_i w_i u_i v_i^T
Matrix weighted_outer_sum(const SvdResult& s, const Vector& weights) {
  Matrix uw = s.u;
  for (std::size_t r = 0; r < uw.rows(); ++r)
    for (std::size_t k = 0; k < uw.cols(); ++k) uw(r, k) *= weights[k];
  return matmul_nt(uw, s.v);
}

double mean_of(const Vector& x) {
  double total = 0.0;
  for (double v : x) total += v;
  return total / static_cast<double>(x.size());
}

}  // namespace

LossValueGrad svd_sum_loss(const SvdResult& s) {
  const double n = static_cast<double>(s.sigma.size());
  return {-mean_of(s.sigma), weighted_outer_sum(s, Vector(s.sigma.size(), -1.0 / n))};
}

LossValueGrad svd_sum_loss(const Matrix& p) { return svd_sum_loss(svd(p)); }

LossValueGrad svd_var_loss(const SvdResult& s) {
  const double n = static_cast<double>(s.sigma.size());
  const double eta = mean_of(s.sigma);
  double value = 0.0;
  Vector weights(s.sigma.size());
  for (std::size_t i = 0; i < s.sigma.size(); ++i) {
    const double d = s.sigma[i] - eta;
    value += d * d;
    weights[i] = 2.0 * d / n;
  }
  return {value / n, weighted_outer_sum(s, weights)};
}

LossValueGrad svd_var_loss(const Matrix& p) { return svd_var_loss(svd(p)); }

LossValueGrad svp_loss(const SvdResult& s, double alpha1, double alpha2) {
  require(alpha1 >= 0.0 && alpha2 >= 0.0, "svp_loss: weights must be >= 0");
  LossValueGrad sum = svd_sum_loss(s);
  LossValueGrad var = svd_var_loss(s);
  LossValueGrad out;
  out.value = alpha1 * sum.value + alpha2 * var.value;
  out.grad = alpha1 * std::move(sum.grad);
  out.grad += alpha2 * std::move(var.grad);
  return out;
}

LossValueGrad svp_loss(const Matrix& p, double alpha1, double alpha2) {
  return svp_loss(svd(p), alpha1, alpha2);
}

LossValueGrad entropy_loss(const Matrix& p) {
  require(p.rows() > 0, "entropy_loss: empty batch");
  const double k = static_cast<double>(p.rows());
  LossValueGrad out{0.0, Matrix(p.rows(), p.cols())};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p.data()[i];
    const double log_x = std::log(std::max(x, kLogFloor));
    out.value -= x * log_x;
    out.grad.data()[i] = -(log_x + 1.0) / k;
  }
  out.value /= k;
  return out;
}

LossValueGrad cross_entropy_loss(const Matrix& logits, const LabelVector& labels) {
  require(labels.size() == logits.rows(),
          "cross_entropy_loss: label count != batch size");
  require(logits.rows() > 0, "cross_entropy_loss: empty batch");
  const double k = static_cast<double>(logits.rows());
  LossValueGrad out{0.0, softmax_rows(logits)};
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    require(labels[r] < logits.cols(), "cross_entropy_loss: label out of range");
    const auto in = logits.row(r);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (double x : in) total += std::exp(x - peak);
    out.value -= in[labels[r]] - peak - std::log(total);
    auto g = out.grad.row(r);
    g[labels[r]] -= 1.0;
    for (double& x : g) x /= k;
  }
  out.value /= k;
  return out;
}

}  // namespace svptta
