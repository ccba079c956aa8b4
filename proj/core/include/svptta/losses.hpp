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

#include "svptta/linalg.hpp"

namespace svptta {

// A scalar loss and its gradient with respect to the loss's matrix input.
struct LossValueGrad {
  double value = 0.0;
  Matrix grad;
};

// Probabilities are floored at this value inside every log term.
inline constexpr double kLogFloor = 1e-12;

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

// Pulls a gradient w.r.t. softmax probabilities back to the logits:
// g_logits = p * (g - rowsum(g * p)).
Matrix softmax_backward(const Matrix& probabilities, const Matrix& grad_probs);

// -(1/N) * sum of singular values; gradient -(1/N) U V^T.
LossValueGrad svd_sum_loss(const Matrix& p);
LossValueGrad svd_sum_loss(const SvdResult& s);

// Population variance of the singular values,
// gradient sum_i (2/N)(lambda_i - mean) u_i v_i^T.
LossValueGrad svd_var_loss(const Matrix& p);
LossValueGrad svd_var_loss(const SvdResult& s);

// alpha1 * svd_sum_loss + alpha2 * svd_var_loss, sharing one decomposition.
LossValueGrad svp_loss(const Matrix& p, double alpha1, double alpha2);
LossValueGrad svp_loss(const SvdResult& s, double alpha1, double alpha2);

// Mean Shannon entropy of the rows of a probability matrix, gradient w.r.t. p.
LossValueGrad entropy_loss(const Matrix& p);

// Mean softmax cross-entropy; gradient w.r.t. the logits.
LossValueGrad cross_entropy_loss(const Matrix& logits, const LabelVector& labels);

}  // namespace svptta
