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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "svptta/linalg.hpp"

namespace svptta::testing {

// Test inputs come from the standard library generator so they do not
// depend on the library's own RandomStream.
inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = normal(gen);
  return m;
}

// Row-stochastic matrix built by exponentiating and normalizing directly.
inline Matrix random_stochastic(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                double temperature = 1.0) {
  Matrix m = random_matrix(rows, cols, seed, temperature);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = m.row(r);
    double total = 0.0;
    for (double& x : row) {
      x = std::exp(x);
      total += x;
    }
    for (double& x : row) x /= total;
  }
  return m;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

// Singular values as square roots of the Gram matrix eigenvalues, descending.
inline Vector oracle_singular_values(const Matrix& m) {
  const Eigen::MatrixXd a = to_eigen(m);
  const Eigen::MatrixXd gram = m.rows() >= m.cols() ? Eigen::MatrixXd(a.transpose() * a)
                                                    : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  Vector out;
  for (Eigen::Index i = eig.eigenvalues().size() - 1; i >= 0; --i)
    out.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()(i))));
  return out;
}

inline double oracle_nuclear_norm(const Matrix& m) {
  double total = 0.0;
  for (double s : oracle_singular_values(m)) total += s;
  return total;
}

inline double smallest_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_eigen(symmetric));
  return eig.eigenvalues()(0);
}

// Central differences of f over every entry of x (x is restored).
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, Matrix x,
                               double h = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f(x);
    x.data()[i] = saved - h;
    const double down = f(x);
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double scale = std::max(frobenius_norm(a), frobenius_norm(b));
  return scale == 0.0 ? 0.0 : frobenius_norm(a - b) / scale;
}

inline double min_gap(const Vector& sigma) {
  double gap = sigma.back();
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i) gap = std::min(gap, sigma[i] - sigma[i + 1]);
  return gap;
}

}  // namespace svptta::testing
