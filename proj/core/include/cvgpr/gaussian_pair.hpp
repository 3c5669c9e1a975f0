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

#ifndef CVGPR_GAUSSIAN_PAIR_HPP_
#define CVGPR_GAUSSIAN_PAIR_HPP_

#include <limits>

#include <Eigen/Core>

#include "cvgpr/types.hpp"

namespace cvgpr {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;
using CMatrix2 = Eigen::Matrix2cd;

// Symplectic matrix of exp(i beta p p̃) in (q, q̃, p, p̃) ordering:
// q -> q - beta p̃, q̃ -> q̃ - beta p.
Matrix4 SymplecticShear(double beta);

// Symplectic form Ω for (q, q̃, p, p̃) ordering.
Matrix4 SymplecticForm();

// The two resource modes after exp(i beta p p̃) acting on the squeezed pair
// psi(q, q̃) = exp(-(q² + q̃²) / (2 xi²)) / (sqrt(pi) xi), hbar = 1.
// In position space psi = c exp(-(1/2) qᵀ Z q) with Z = (xi² I - i beta X)⁻¹.
class GaussianPair {
 public:
  GaussianPair() = default;
  GaussianPair(double xi, double shear) : xi_(xi), shear_(shear) {}

  static GaussianPair Squeezed(double xi);

  double xi() const { return xi_; }
  double shear() const { return shear_; }
  GaussianPair Sheared(double beta) const { return {xi_, shear_ + beta}; }

  Vector4 Mean() const { return Vector4::Zero(); }
  Matrix4 Covariance() const;
  Complex Phase() const { return {1.0, 0.0}; }

  CMatrix2 QuadraticForm() const;
  Complex Prefactor() const;
  Complex Wavefunction(double q, double q_tilde) const;
  Complex MomentumWavefunction(double p, double p_tilde) const;

 private:
  double xi_ = 1.0;
  double shear_ = 0.0;
};

// <q, q̃| exp(i gamma lambda_eff p p̃) |Φ(xi)>.
Complex OverlapClosedForm(double lambda_eff, double xi, double gamma, double q, double q_tilde);

// Π = ∫∫_{[-w, w]²} |q, q̃><q, q̃|; an infinite half-width is the identity.
struct HomodyneWindow {
  double half_width = std::numeric_limits<double>::infinity();

  static HomodyneWindow FromXi(double xi);
  static HomodyneWindow Full() { return {}; }
  bool is_full() const { return half_width == std::numeric_limits<double>::infinity(); }
};

// <a| Π |b>. Closed form for the full space and for real diagonal integrands,
// Gauss-Legendre panels otherwise.
Complex WindowOverlap(const GaussianPair& a, const GaussianPair& b, const HomodyneWindow& window);

// ∫∫_{[-w,w]²} c exp(-(1/2) qᵀ M q) for complex symmetric M with positive definite real part.
Complex GaussianWindowIntegral(const CMatrix2& M, Complex c, double half_width);

}  // namespace cvgpr

#endif  // CVGPR_GAUSSIAN_PAIR_HPP_
