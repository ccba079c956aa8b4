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
#include <initializer_list>
#include <span>
#include <vector>

#include "svptta/random.hpp"

namespace svptta {

using Vector = std::vector<double>;
using Label = std::uint32_t;
using LabelVector = std::vector<Label>;

// Dense row-major matrix of doubles. Constructors reject non-finite data.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vector column(std::size_t c) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double scale);
Matrix operator*(double scale, Matrix a);

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Vector matvec(const Matrix& a, std::span<const double> x);
Matrix outer(std::span<const double> x, std::span<const double> y);
double dot(std::span<const double> x, std::span<const double> y);
double frobenius_norm(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
double trace(const Matrix& m);
// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);
LabelVector argmax_rows(const Matrix& m);

// Thin SVD: m = u * diag(sigma) * v^T with N = min(rows, cols).
struct SvdResult {
  Matrix u;      // rows x N, orthonormal columns
  Vector sigma;  // N values, descending, non-negative
  Matrix v;      // cols x N, orthonormal columns

  std::size_t rank_count() const noexcept { return sigma.size(); }
  Matrix reconstruct() const;
};

// One-sided (Hestenes) Jacobi with cyclic sweeps, capped at kSvdMaxSweeps.
// Throws ConvergenceError carrying the remaining off-diagonal residual.
inline constexpr int kSvdMaxSweeps = 60;
SvdResult svd(const Matrix& m);

struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;  // diagonal shift that was actually applied
};

// Lower-triangular L with L L^T = c + jitter I. On failure the jitter is
// escalated tenfold up to 1e-2 * mean(diag(c)); beyond that throws
// NotPositiveDefinite naming the failing pivot.
CholeskyFactor cholesky_factor(const Matrix& c, double jitter);
Matrix cholesky(const Matrix& c, double jitter);

// mean + cov_chol * z, z ~ N(0, I) drawn from rng.
Vector sample_mvn(std::span<const double> mean, const Matrix& cov_chol,
                  RandomStream& rng);

}  // namespace svptta
