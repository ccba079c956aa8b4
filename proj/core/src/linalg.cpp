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

#include "svptta/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "svptta/error.hpp"

namespace svptta {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  require(std::isfinite(fill), "Matrix: fill value must be finite");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, "Matrix: data length != rows * cols");
  require(all_finite(), "Matrix: non-finite entry");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require(all_finite(), "Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          "Matrix +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          "Matrix -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double scale) {
  for (double& x : data_) x *= scale;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double scale) { return a *= scale; }
Matrix operator*(double scale, Matrix a) { return a *= scale; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: row count mismatch");
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto a_row = a.row(k);
    auto b_row = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a_row[i];
      if (aki == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: column count mismatch");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto a_row = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a_row, b.row(j));
  }
  return out;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Matrix outer(std::span<const double> x, std::span<const double> y) {
  Matrix out(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out(i, j) = x[i] * y[j];
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "max_abs_diff: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

double trace(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) s += m(i, i);
  return s;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

LabelVector argmax_rows(const Matrix& m) {
  LabelVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    out[r] = static_cast<Label>(argmax(m.row(r)));
  return out;
}

// ---------------------------------------------------------------------------
// SVD

Matrix SvdResult::reconstruct() const {
  Matrix us = u;
  for (std::size_t r = 0; r < us.rows(); ++r)
    for (std::size_t c = 0; c < us.cols(); ++c) us(r, c) *= sigma[c];
  return matmul_nt(us, v);
}

namespace {

// Column-major working copy: columns[j] is column j of the matrix.
using Columns = std::vector<Vector>;

void rotate(Vector& p, Vector& q, double c, double s) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double xp = p[i];
    const double xq = q[i];
    p[i] = c * xp - s * xq;
    q[i] = s * xp + c * xq;
  }
}

// Fills null columns of u (marked in `defined`) with an orthonormal
// completion, trying standard basis vectors in order.
void complete_basis(Columns& u, const std::vector<bool>& defined) {
  const std::size_t m = u.empty() ? 0 : u.front().size();
  std::vector<bool> have = defined;
  std::size_t next_basis = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (have[j]) continue;
    while (next_basis < m) {
      Vector cand(m, 0.0);
      cand[next_basis++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < u.size(); ++k) {
          if (!have[k]) continue;
          const double proj = dot(cand, u[k]);
          for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u[k][i];
        }
      }
      const double norm = std::sqrt(dot(cand, cand));
      if (norm > 0.5) {
        for (double& x : cand) x /= norm;
        u[j] = std::move(cand);
        have[j] = true;
        break;
      }
    }
    require(have[j], "svd: failed to complete orthonormal basis");
  }
}

// Sign convention: largest-magnitude entry of each u column is positive,
// v follows.
void apply_sign_convention(SvdResult& r) {
  for (std::size_t k = 0; k < r.sigma.size(); ++k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.u.rows(); ++i)
      if (std::abs(r.u(i, k)) > std::abs(r.u(best, k))) best = i;
    if (r.u(best, k) < 0.0) {
      for (std::size_t i = 0; i < r.u.rows(); ++i) r.u(i, k) = -r.u(i, k);
      for (std::size_t i = 0; i < r.v.rows(); ++i) r.v(i, k) = -r.v(i, k);
    }
  }
}

// Tall case, rows >= cols.
SvdResult jacobi_svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Columns w(n, Vector(m));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) w[c][r] = a(r, c);
  Columns v(n, Vector(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  const double fro = frobenius_norm(a);
  const double abs_floor = (1e-12 * fro) * (1e-12 * fro);
  const double rel_tol =
      std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(m));

  bool converged = fro == 0.0;
  double residual = 0.0;
  for (int sweep = 0; sweep < kSvdMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    residual = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(w[p], w[p]);
        const double beta = dot(w[q], w[q]);
        const double gamma = dot(w[p], w[q]);
        const double scale = std::sqrt(alpha * beta);
        if (scale > 0.0) residual = std::max(residual, std::abs(gamma) / scale);
        if (std::abs(gamma) <= rel_tol * scale || std::abs(gamma) <= abs_floor)
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(w[p], w[q], c, s);
        rotate(v[p], v[q], c, s);
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "svd: no convergence after " << kSvdMaxSweeps
        << " sweeps, off-diagonal residual " << residual;
    throw ConvergenceError(msg.str(), residual);
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(w[j], w[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double sigma_max = n == 0 ? 0.0 : sigma[order.front()];
  const double null_cut = sigma_max * 1e-13;
  Columns u(n);
  Columns vs(n);
  Vector sorted_sigma(n);
  std::vector<bool> defined(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    sorted_sigma[k] = sigma[j];
    vs[k] = v[j];
    if (sigma[j] > null_cut && sigma[j] > 0.0) {
      u[k] = w[j];
      for (double& x : u[k]) x /= sigma[j];
      defined[k] = true;
    } else {
      u[k] = Vector(m, 0.0);
    }
  }
  complete_basis(u, defined);

  SvdResult out{Matrix(m, n), std::move(sorted_sigma), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = u[k][i];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = vs[k][i];
  }
  apply_sign_convention(out);
  return out;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  require(!m.empty(), "svd: empty matrix");
  require(m.all_finite(), "svd: non-finite entry");
  if (m.rows() >= m.cols()) return jacobi_svd_tall(m);
  SvdResult t = jacobi_svd_tall(m.transpose());
  SvdResult out{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  apply_sign_convention(out);
  return out;
}

// ---------------------------------------------------------------------------
// Cholesky

namespace {

// Returns the failing pivot index, or -1 on success.
long try_cholesky(const Matrix& c, double jitter, Matrix& lower) {
  const std::size_t n = c.rows();
  lower = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = c(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return static_cast<long>(j);
    const double d = std::sqrt(pivot);
    lower(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = c(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / d;
    }
  }
  return -1;
}

}  // namespace

CholeskyFactor cholesky_factor(const Matrix& c, double jitter) {
  require(c.rows() == c.cols(), "cholesky: matrix must be square");
  require(jitter >= 0.0, "cholesky: jitter must be non-negative");
  const std::size_t n = c.rows();
  double max_abs = 0.0;
  for (double x : c.data()) max_abs = std::max(max_abs, std::abs(x));
  const double sym_tol = 1e-8 * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(c(i, j) - c(j, i)) <= sym_tol,
              "cholesky: matrix is not symmetric");

  const double mean_diag = n == 0 ? 0.0 : trace(c) / static_cast<double>(n);
  const double cap = 1e-2 * mean_diag;
  double current = jitter;
  CholeskyFactor out;
  long failed = try_cholesky(c, current, out.lower);
  while (failed >= 0) {
    double next = current > 0.0 ? current * 10.0 : 1e-12 * mean_diag;
    if (!(next > current) || next > cap) break;
    current = next;
    failed = try_cholesky(c, current, out.lower);
  }
  if (failed >= 0) {
    std::ostringstream msg;
    msg << "cholesky: not positive definite at pivot " << failed
        << " (jitter escalated to " << current << ")";
    throw NotPositiveDefinite(msg.str(), static_cast<std::size_t>(failed));
  }
  out.jitter = current;
  return out;
}

Matrix cholesky(const Matrix& c, double jitter) {
  return cholesky_factor(c, jitter).lower;
}

Vector sample_mvn(std::span<const double> mean, const Matrix& cov_chol,
                  RandomStream& rng) {
  require(cov_chol.rows() == mean.size() && cov_chol.cols() == mean.size(),
          "sample_mvn: dimension mismatch");
  const std::size_t n = mean.size();
  Vector z(n);
  for (double& x : z) x = rng.normal();
  Vector out(mean.begin(), mean.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = cov_chol.row(i);
    for (std::size_t k = 0; k <= i; ++k) out[i] += row[k] * z[k];
  }
  return out;
}

}  // namespace svptta
