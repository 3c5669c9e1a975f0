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
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "cvgpr/error.hpp"

namespace cvgpr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelNodes = 20;
constexpr int kMaxPanels = 256;
constexpr double kQuadratureTolerance = 1e-13;

}  // namespace

Matrix4 SymplecticShear(double beta) {
  Matrix4 s = Matrix4::Identity();
  s(0, 3) = -beta;
  s(1, 2) = -beta;
  return s;
}

Matrix4 SymplecticForm() {
  Matrix4 omega = Matrix4::Zero();
  omega(0, 2) = 1.0;
  omega(1, 3) = 1.0;
  omega(2, 0) = -1.0;
  omega(3, 1) = -1.0;
  return omega;
}

GaussianPair GaussianPair::Squeezed(double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError(fmt::format("xi must be positive, got {}", xi));
  return {xi, 0.0};
}

Matrix4 GaussianPair::Covariance() const {
  const double x2 = xi_ * xi_;
  const Vector4 diag(x2 / 2.0, x2 / 2.0, 1.0 / (2.0 * x2), 1.0 / (2.0 * x2));
  const Matrix4 s = SymplecticShear(shear_);
  return s * diag.asDiagonal() * s.transpose();
}

CMatrix2 GaussianPair::QuadraticForm() const {
  const double x2 = xi_ * xi_;
  const double det = x2 * x2 + shear_ * shear_;
  CMatrix2 z;
  z << Complex(x2 / det, 0.0), Complex(0.0, shear_ / det), Complex(0.0, shear_ / det), Complex(x2 / det, 0.0);
  return z;
}

Complex GaussianPair::Prefactor() const {
  const double x2 = xi_ * xi_;
  return {xi_ / (std::sqrt(kPi) * std::sqrt(x2 * x2 + shear_ * shear_)), 0.0};
}

Complex GaussianPair::Wavefunction(double q, double q_tilde) const {
  const double x2 = xi_ * xi_;
  const double det = x2 * x2 + shear_ * shear_;
  const Complex exponent(-x2 * (q * q + q_tilde * q_tilde), -2.0 * shear_ * q * q_tilde);
  return Prefactor() * std::exp(exponent / (2.0 * det));
}

Complex GaussianPair::MomentumWavefunction(double p, double p_tilde) const {
  const double amp = xi_ / std::sqrt(kPi) * std::exp(-xi_ * xi_ * (p * p + p_tilde * p_tilde) / 2.0);
  return amp * std::exp(Complex(0.0, shear_ * p * p_tilde));
}

Complex OverlapClosedForm(double lambda_eff, double xi, double gamma, double q, double q_tilde) {
  if (!(xi > 0.0)) throw InputError(fmt::format("xi must be positive, got {}", xi));
  return GaussianPair(xi, gamma * lambda_eff).Wavefunction(q, q_tilde);
}

HomodyneWindow HomodyneWindow::FromXi(double xi) {
  if (!(xi > 0.0)) throw InputError(fmt::format("window xi must be positive, got {}", xi));
  return {xi};
}

namespace {

// ∫_{-w}^{w} exp(-m t² / 2) dt for real m > 0.
double RealGaussianSegment(double m, double w) {
  return std::sqrt(2.0 * kPi / m) * std::erf(w * std::sqrt(m / 2.0));
}

Complex PanelSum(const CMatrix2& M, double half_width, int panels) {
  using Rule = boost::math::quadrature::gauss<double, kPanelNodes>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();

  // Nodes and weights on [-w, w] (first axis) and [0, w] (second axis);
  // f(-q, -q̃) = f(q, q̃) lets the second axis fold onto the half interval.
  auto build = [&](double lo, double hi, int count, std::vector<double>& x, std::vector<double>& wt) {
    const double width = (hi - lo) / count;
    for (int p = 0; p < count; ++p) {
      const double mid = lo + (p + 0.5) * width;
      const double half = width / 2.0;
      for (std::size_t k = 0; k < abscissa.size(); ++k) {
        if (abscissa[k] == 0.0) {
          x.push_back(mid);
          wt.push_back(weights[k] * half);
          continue;
        }
        x.push_back(mid - half * abscissa[k]);
        wt.push_back(weights[k] * half);
        x.push_back(mid + half * abscissa[k]);
        wt.push_back(weights[k] * half);
      }
    }
  };
  std::vector<double> x1, w1, x2, w2;
  build(-half_width, half_width, 2 * panels, x1, w1);
  build(0.0, half_width, panels, x2, w2);

  const Complex a = M(0, 0);
  const Complex b = M(0, 1) + M(1, 0);
  const Complex d = M(1, 1);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double q = x1[i];
    Complex row = 0.0;
    for (std::size_t j = 0; j < x2.size(); ++j) {
      const double t = x2[j];
      row += w2[j] * std::exp(-0.5 * (a * q * q + b * q * t + d * t * t));
    }
    sum += w1[i] * row;
  }
  return 2.0 * sum;
}

}  // namespace

Complex GaussianWindowIntegral(const CMatrix2& M, Complex c, double half_width) {
  if (half_width == std::numeric_limits<double>::infinity()) {
    const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    return c * 2.0 * kPi / std::sqrt(det);
  }
  if (!(half_width > 0.0)) return 0.0;
  const bool real_diagonal = M(0, 1) == 0.0 && M(1, 0) == 0.0 && M(0, 0).imag() == 0.0 && M(1, 1).imag() == 0.0;
  if (real_diagonal) {
    return c * RealGaussianSegment(M(0, 0).real(), half_width) * RealGaussianSegment(M(1, 1).real(), half_width);
  }
  Complex previous = PanelSum(M, half_width, 1);
  for (int panels = 2; panels <= kMaxPanels; panels *= 2) {
    const Complex current = PanelSum(M, half_width, panels);
    if (std::abs(current - previous) <= kQuadratureTolerance * std::max(1.0, std::abs(current))) {
      return c * current;
    }
    previous = current;
  }
  throw NumericalError("window quadrature did not converge");
}

Complex WindowOverlap(const GaussianPair& a, const GaussianPair& b, const HomodyneWindow& window) {
  const CMatrix2 M = a.QuadraticForm().conjugate() + b.QuadraticForm();
  const Complex c = std::conj(a.Prefactor()) * b.Prefactor();
  return GaussianWindowIntegral(M, c, window.half_width);
}

}  // namespace cvgpr
