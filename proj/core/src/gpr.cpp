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

#include "cvgpr/gpr.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "cvgpr/error.hpp"

namespace cvgpr {

std::string KernelFamilyName(KernelFamily family) {
  switch (family) {
    case KernelFamily::kSquaredExponential:
      return "squared-exponential";
    case KernelFamily::kLinear:
      return "linear";
    case KernelFamily::kConstant:
      return "constant";
  }
  return "unknown";
}

KernelFamily ParseKernelFamily(const std::string& name) {
  if (name == "squared-exponential" || name == "se" || name == "rbf") {
    return KernelFamily::kSquaredExponential;
  }
  if (name == "linear") return KernelFamily::kLinear;
  if (name == "constant") return KernelFamily::kConstant;
  throw InputError(fmt::format("unknown kernel family '{}'", name));
}

void KernelSpec::Validate() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
    throw InputError(fmt::format("kernel length scale must be positive, got {}", length_scale));
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw InputError(fmt::format("kernel amplitude must be positive, got {}", amplitude));
  }
}

void TrainingSet::Validate() const {
  if (inputs.empty()) throw InputError("training set is empty");
  if (targets.size() != size()) {
    throw InputError(fmt::format("training set has {} inputs but {} targets", size(), targets.size()));
  }
  const Index d = dimension();
  if (d < 1) throw InputError("input dimension must be at least 1");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != d) {
      throw InputError(fmt::format("input {} has dimension {}, expected {}", i, inputs[i].size(), d));
    }
    if (!inputs[i].allFinite()) throw InputError(fmt::format("input {} is not finite", i));
  }
  if (!targets.allFinite()) throw InputError("targets contain non-finite values");
}

double KernelEval(const KernelSpec& spec, const Vector& x, const Vector& x_prime) {
  if (x.size() != x_prime.size()) {
    throw InputError(fmt::format("kernel arguments differ in dimension ({} vs {})", x.size(), x_prime.size()));
  }
  switch (spec.family) {
    case KernelFamily::kSquaredExponential: {
      const double r2 = (x - x_prime).squaredNorm();
      return spec.amplitude * std::exp(-r2 / (2.0 * spec.length_scale * spec.length_scale));
    }
    case KernelFamily::kLinear:
      return spec.amplitude * x.dot(x_prime);
    case KernelFamily::kConstant:
      return spec.amplitude;
  }
  return 0.0;
}

CovarianceSystem BuildCovarianceSystem(const TrainingSet& data, const KernelSpec& spec,
                                       const NoiseModel& noise, const Vector& x_star) {
  data.Validate();
  spec.Validate();
  if (!(noise.sigma2 >= 0.0) || !std::isfinite(noise.sigma2)) {
    throw InputError(fmt::format("noise variance must be non-negative, got {}", noise.sigma2));
  }
  if (x_star.size() != data.dimension()) {
    throw InputError(fmt::format("test point has dimension {}, training inputs have {}", x_star.size(),
                                 data.dimension()));
  }
  if (!x_star.allFinite()) throw InputError("test point is not finite");

  const Index n = data.size();
  CovarianceSystem system;
  system.sigma2 = noise.sigma2;
  system.K.resize(n, n);
  system.k_star.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double v = KernelEval(spec, data.inputs[i], data.inputs[j]);
      system.K(i, j) = v;
      system.K(j, i) = v;
    }
    system.K(i, i) += noise.sigma2;
    system.k_star(i) = KernelEval(spec, data.inputs[i], x_star);
  }
  system.k_star_star = KernelEval(spec, x_star, x_star);
  return system;
}

namespace {

double ConditionFromEigenvalues(const Vector& eigenvalues) {
  const Vector mags = eigenvalues.cwiseAbs();
  const double lo = mags.minCoeff();
  const double hi = mags.maxCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

double ConditionNumber(const Matrix& K) {
  if (K.rows() != K.cols() || K.rows() == 0) throw InputError("condition number needs a nonempty square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(K, Eigen::EigenvaluesOnly);
  return ConditionFromEigenvalues(solver.eigenvalues());
}

PosteriorResult ClassicalPosterior(const CovarianceSystem& system, const Vector& y, double condition_cap) {
  const Index n = system.K.rows();
  if (system.K.cols() != n || n == 0) throw InputError("covariance matrix must be nonempty and square");
  if (system.k_star.size() != n || y.size() != n) {
    throw InputError(fmt::format("posterior needs vectors of length {}", n));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(system.K);
  const Vector& lambda = solver.eigenvalues();
  const double kappa = ConditionFromEigenvalues(lambda);
  if (!(kappa <= condition_cap)) {
    throw ConditioningError(
        fmt::format("covariance matrix condition number {:.6g} exceeds cap {:.6g}; consider noise dilution", kappa,
                    condition_cap),
        kappa);
  }
  const Matrix& V = solver.eigenvectors();
  PosteriorResult result;
  result.k_tilde = V * (V.transpose() * system.k_star).cwiseQuotient(lambda);
  result.mean = y.dot(result.k_tilde);
  result.variance = system.k_star_star - system.k_star.dot(result.k_tilde);
  result.condition_number = kappa;
  return result;
}

double NoiseDilution(const Matrix& K, double sigma2, double lambda_floor) {
  if (!(lambda_floor > 0.0)) throw InputError("dilution floor must be positive");
  if (!(sigma2 >= 0.0)) throw InputError("noise variance must be non-negative");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(K, Eigen::EigenvaluesOnly);
  const double bare_min = solver.eigenvalues().minCoeff() - sigma2;
  return std::max(sigma2, lambda_floor - bare_min);
}

}  // namespace cvgpr
