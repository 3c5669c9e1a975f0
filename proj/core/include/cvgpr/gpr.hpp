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

#ifndef CVGPR_GPR_HPP_
#define CVGPR_GPR_HPP_

#include <string>
#include <vector>

#include "cvgpr/types.hpp"

namespace cvgpr {

inline constexpr double kDefaultConditionCap = 1e8;

enum class KernelFamily { kSquaredExponential, kLinear, kConstant };

std::string KernelFamilyName(KernelFamily family);
KernelFamily ParseKernelFamily(const std::string& name);

// k(x, x') = a² exp(-|x - x'|² / (2 l²)) for the squared-exponential family,
// a² x.x' for the linear family and a² for the constant family.
struct KernelSpec {
  KernelFamily family = KernelFamily::kSquaredExponential;
  double length_scale = 1.0;
  double amplitude = 1.0;  // a²

  void Validate() const;
};

struct NoiseModel {
  double sigma2 = 0.0;
};

struct TrainingSet {
  std::vector<Vector> inputs;
  Vector targets;

  Index size() const { return static_cast<Index>(inputs.size()); }
  Index dimension() const { return inputs.empty() ? 0 : inputs.front().size(); }
  // Throws InputError unless N >= 1, all points share d >= 1 and every value is finite.
  void Validate() const;
};

struct CovarianceSystem {
  Matrix K;
  Vector k_star;
  double k_star_star = 0.0;
  double sigma2 = 0.0;
};

struct PosteriorResult {
  double mean = 0.0;
  double variance = 0.0;
  Vector k_tilde;
  double condition_number = 0.0;
};

double KernelEval(const KernelSpec& spec, const Vector& x, const Vector& x_prime);

CovarianceSystem BuildCovarianceSystem(const TrainingSet& data, const KernelSpec& spec,
                                       const NoiseModel& noise, const Vector& x_star);

// Solves through the eigendecomposition of the symmetric K.
PosteriorResult ClassicalPosterior(const CovarianceSystem& system, const Vector& y,
                                   double condition_cap = kDefaultConditionCap);

// max|lambda| / min|lambda|; +infinity when the smallest magnitude is zero.
double ConditionNumber(const Matrix& K);

// Smallest sigma2' >= sigma2 with lambda_min(K - sigma2 I + sigma2' I) >= lambda_floor.
double NoiseDilution(const Matrix& K, double sigma2, double lambda_floor);

}  // namespace cvgpr

#endif  // CVGPR_GPR_HPP_
