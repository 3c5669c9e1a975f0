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

#include "cvgpr/gaussian_pair.hpp"

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cvgpr/error.hpp"
#include "support.hpp"

namespace cvgpr {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Sheared squeezed pair written out by hand.
Complex ReferencePsi(double xi, double beta, double q, double qt) {
  const double den = std::pow(xi, 4) + beta * beta;
  const Complex exponent(-xi * xi * (q * q + qt * qt) / (2.0 * den), -beta * q * qt / den);
  return xi / std::sqrt(kPi) / std::sqrt(den) * std::exp(exponent);
}

// Midpoint rule on [-w, w]² with n² cells.
Complex Integrate2d(const std::function<Complex(double, double)>& f, double w, int n) {
  const double h = 2.0 * w / n;
  Complex sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double q = -w + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) sum += f(q, -w + (j + 0.5) * h);
  }
  return sum * h * h;
}

TEST(GaussianPairTest, SqueezedVacuumWavefunction) {
  const GaussianPair g = GaussianPair::Squeezed(0.3);
  const double expected = std::exp(-(0.04 + 0.01) / (2.0 * 0.09)) / (std::sqrt(kPi) * 0.3);
  EXPECT_NEAR(std::abs(g.Wavefunction(0.2, -0.1) - expected), 0.0, 1e-14);
  EXPECT_THROW(GaussianPair::Squeezed(0.0), InputError);
}

TEST(GaussianPairTest, ShearedMatchesHandFormula) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double xi = testing::Uniform(rng, 0.05, 2.0);
    const double beta = testing::Uniform(rng, -10.0, 10.0);
    const double q = testing::Uniform(rng, -3.0, 3.0);
    const double qt = testing::Uniform(rng, -3.0, 3.0);
    const Complex ref = ReferencePsi(xi, beta, q, qt);
    EXPECT_LE(std::abs(GaussianPair(xi, beta).Wavefunction(q, qt) - ref), 1e-12 * (1.0 + std::abs(ref)));
    EXPECT_LE(std::abs(OverlapClosedForm(0.5, xi, 2.0 * beta, q, qt) - ref), 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST(GaussianPairTest, ShearComposes) {
  const GaussianPair g = GaussianPair(0.4, 0.3).Sheared(-1.1);
  EXPECT_DOUBLE_EQ(g.shear(), 0.3 - 1.1);
  EXPECT_DOUBLE_EQ(g.xi(), 0.4);
}

TEST(GaussianPairTest, WavefunctionIsNormalized) {
  const GaussianPair g(1.0, 0.7);
  const Complex norm = Integrate2d([&](double q, double qt) { return std::norm(g.Wavefunction(q, qt)); }, 8.0, 400);
  EXPECT_NEAR(norm.real(), 1.0, 1e-9);
}

TEST(GaussianPairTest, CovarianceMatchesWavefunctionMoments) {
  const GaussianPair g(0.8, 1.3);
  const Matrix4 v = g.Covariance();
  const Complex qq = Integrate2d([&](double q, double qt) { return q * q * std::norm(g.Wavefunction(q, qt)); }, 10.0, 500);
  const Complex qqt =
      Integrate2d([&](double q, double qt) { return q * qt * std::norm(g.Wavefunction(q, qt)); }, 10.0, 500);
  EXPECT_NEAR(v(0, 0), qq.real(), 1e-8);
  EXPECT_NEAR(v(0, 1), qqt.real(), 1e-8);
  EXPECT_NEAR(v(2, 2), 1.0 / (2.0 * 0.64), 1e-14);
}

TEST(GaussianPairTest, ShearIsSymplectic) {
  std::mt19937_64 rng(4);
  const Matrix4 omega = SymplecticForm();
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix4 s = SymplecticShear(testing::Uniform(rng, -5.0, 5.0));
    EXPECT_LE((s * omega * s.transpose() - omega).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(GaussianPairTest, CovarianceSatisfiesUncertainty) {
  // V + (i/2) Ω >= 0 with equality in two directions for a pure state.
  const GaussianPair g(0.2, 3.0);
  const Eigen::Matrix4cd m = g.Covariance().cast<Complex>() + Complex(0.0, 0.5) * SymplecticForm().cast<Complex>();
  const Eigen::Vector4d e = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(m).eigenvalues();
  EXPECT_GE(e.minCoeff(), -1e-10);
  EXPECT_NEAR(e(0), 0.0, 1e-10);
  EXPECT_NEAR(e(1), 0.0, 1e-10);
  // Entries reach ~shear² / xi², so the determinant loses digits to cancellation.
  EXPECT_NEAR(16.0 * g.Covariance().determinant(), 1.0, 1e-8);
}

TEST(GaussianPairTest, MomentumWavefunctionIsFourierTransform) {
  const GaussianPair g(1.0, 0.5);
  for (auto [p, pt] : {std::pair{0.3, -0.4}, std::pair{1.0, 0.8}, std::pair{0.0, 0.0}}) {
    const Complex ft = Integrate2d(
        [&](double q, double qt) { return std::exp(Complex(0.0, -(p * q + pt * qt))) * g.Wavefunction(q, qt); }, 12.0,
        480) / (2.0 * kPi);
    EXPECT_LE(std::abs(ft - g.MomentumWavefunction(p, pt)), 1e-9);
  }
}

TEST(WindowOverlapTest, ErfSquaredAtMatchedWindow) {
  for (double xi : {0.05, 0.1, 1.0}) {
    const GaussianPair g = GaussianPair::Squeezed(xi);
    const Complex p = WindowOverlap(g, g, HomodyneWindow::FromXi(xi));
    EXPECT_NEAR(p.real(), 0.7101446264380783, 1e-12);
    EXPECT_NEAR(p.imag(), 0.0, 1e-15);
  }
}

TEST(WindowOverlapTest, FullSpaceIsUnitNormAndMatchesQuadrature) {
  const GaussianPair a(0.7, 0.4), b(0.7, -1.2);
  EXPECT_NEAR(std::abs(WindowOverlap(a, a, HomodyneWindow::Full()) - 1.0), 0.0, 1e-13);
  const Complex ref = Integrate2d(
      [&](double q, double qt) { return std::conj(a.Wavefunction(q, qt)) * b.Wavefunction(q, qt); }, 12.0, 600);
  EXPECT_LE(std::abs(WindowOverlap(a, b, HomodyneWindow::Full()) - ref), 1e-9);
}

TEST(WindowOverlapTest, FiniteWindowMatchesQuadrature) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 8; ++trial) {
    const double xi = testing::Uniform(rng, 0.3, 1.0);
    const GaussianPair a(xi, testing::Uniform(rng, -3.0, 3.0));
    const GaussianPair b(xi, testing::Uniform(rng, -3.0, 3.0));
    const double w = testing::Uniform(rng, 0.2, 1.5);
    const Complex ref = Integrate2d(
        [&](double q, double qt) { return std::conj(a.Wavefunction(q, qt)) * b.Wavefunction(q, qt); }, w, 800);
    EXPECT_LE(std::abs(WindowOverlap(a, b, HomodyneWindow{w}) - ref), 2e-6 * (1.0 + std::abs(ref)));
  }
}

TEST(WindowOverlapTest, HermitianInArguments) {
  const GaussianPair a(0.5, 2.0), b(0.5, -0.7);
  const HomodyneWindow w{0.5};
  EXPECT_LE(std::abs(WindowOverlap(a, b, w) - std::conj(WindowOverlap(b, a, w))), 1e-13);
}

TEST(GaussianWindowIntegralTest, RealDiagonalClosedForm) {
  CMatrix2 m = CMatrix2::Zero();
  m(0, 0) = 2.0;
  m(1, 1) = 0.5;
  const Complex v = GaussianWindowIntegral(m, 1.0, 1.0);
  const double ref = std::sqrt(kPi) * std::erf(1.0) * std::sqrt(4.0 * kPi) * std::erf(0.5);
  EXPECT_NEAR(v.real(), ref, 1e-13);
}

}  // namespace
}  // namespace cvgpr
