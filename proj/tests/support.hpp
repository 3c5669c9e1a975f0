// Copyright 2026 The cvgpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Helpers shared by the unit and acceptance tests: seeded generators and
// brute-force reference computations that do not go through the library.
#ifndef CVGPR_TESTS_SUPPORT_HPP_
#define CVGPR_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "cvgpr/gpr.hpp"
#include "cvgpr/types.hpp"

namespace cvgpr::testing {

inline double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix RandomSymmetric(std::mt19937_64& rng, Index n, double lo = -1.0, double hi = 1.0) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = Uniform(rng, lo, hi);
  }
  return m;
}

// Symmetric positive definite with eigenvalues in [lo, hi].
inline Matrix RandomSpd(std::mt19937_64& rng, Index n, double lo, double hi) {
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = Uniform(rng, -1.0, 1.0);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ();
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = Uniform(rng, lo, hi);
  Matrix out = q * d.asDiagonal() * q.transpose();
  return (out + out.transpose()) / 2.0;
}

inline TrainingSet RandomTrainingSet(std::mt19937_64& rng, Index n, Index d) {
  TrainingSet data;
  for (Index i = 0; i < n; ++i) {
    Vector x(d);
    for (Index k = 0; k < d; ++k) x(k) = Uniform(rng, -1.0, 1.0);
    data.inputs.push_back(x);
  }
  data.targets.resize(n);
  for (Index i = 0; i < n; ++i) data.targets(i) = Uniform(rng, -1.0, 1.0);
  return data;
}

// Laplace expansion along the first row.
inline double CofactorDeterminant(const Matrix& m) {
  const Index n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (Index c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (Index i = 1; i < n; ++i) {
      for (Index j = 0, jj = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, jj++) = m(i, j);
      }
    }
    det += ((c % 2 == 0) ? 1.0 : -1.0) * m(0, c) * CofactorDeterminant(minor);
  }
  return det;
}

// adj(m) / det(m).
inline Matrix CofactorInverse(const Matrix& m) {
  const Index n = m.rows();
  if (n == 1) return Matrix::Constant(1, 1, 1.0 / m(0, 0));
  Matrix adj(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      Matrix minor(n - 1, n - 1);
      for (Index i = 0, ii = 0; i < n; ++i) {
        if (i == r) continue;
        for (Index j = 0, jj = 0; j < n; ++j) {
          if (j == c) continue;
          minor(ii, jj++) = m(i, j);
        }
        ++ii;
      }
      adj(c, r) = (((r + c) % 2 == 0) ? 1.0 : -1.0) * CofactorDeterminant(minor);
    }
  }
  return adj / CofactorDeterminant(m);
}

inline double SquaredExponential(const Vector& a, const Vector& b, double amplitude, double length) {
  return amplitude * std::exp(-(a - b).squaredNorm() / (2.0 * length * length));
}

}  // namespace cvgpr::testing

#endif  // CVGPR_TESTS_SUPPORT_HPP_
