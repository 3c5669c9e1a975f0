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

#ifndef CVGPR_PIPELINE_HPP_
#define CVGPR_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "cvgpr/dilation.hpp"
#include "cvgpr/gpr.hpp"
#include "cvgpr/hybrid_state.hpp"
#include "cvgpr/oracle_engine.hpp"

namespace cvgpr {

inline constexpr const char* kReportVersion = "1.0";

enum class ExecutionPath { kDirect, kOracle };
enum class MeasurementMode { kExact, kSampled };
// kWindowOverlap divides by 2N' · 2 erf²(w / (xi sqrt 2)), the asymptotic weight of the
// window overlap <Φ_0|Π|Φ_β> |β| / xi². kReferenceNorm divides by 2N' times the squared
// norm of the gamma = 0 window-projected input.
enum class CalibrationMode { kWindowOverlap, kReferenceNorm };

std::string PathName(ExecutionPath path);
std::string ModeName(MeasurementMode mode);
std::string CalibrationName(CalibrationMode mode);
ExecutionPath ParsePath(const std::string& name);
MeasurementMode ParseMode(const std::string& name);
CalibrationMode ParseCalibration(const std::string& name);

struct PipelineConfig {
  double xi = 0.1;
  double epsilon_target = 0.05;
  std::optional<double> gamma;
  std::optional<std::int64_t> steps;
  std::optional<double> zeta;  // defaults to ||K̂||_max / 8
  ExecutionPath path = ExecutionPath::kDirect;
  MeasurementMode mode = MeasurementMode::kExact;
  std::int64_t shots = 10000;
  std::uint64_t seed = 1;
  int sign = +1;
  std::optional<double> window_half_width;  // defaults to xi
  CalibrationMode calibration = CalibrationMode::kWindowOverlap;
  std::int64_t retry_cap = 1000;
  std::int64_t lattice_cap = kDefaultLatticeCap;
  double condition_cap = kDefaultConditionCap;
  std::int64_t quantization_cap = kDefaultQuantizationCap;
  std::optional<double> y_scale;
  std::optional<double> k_scale;
  bool trace_distance = true;
  double trace_tolerance = 1e-9;

  void Validate() const;
};

struct ParameterChoice {
  double gamma = 0.0;
  std::int64_t steps = 0;
  double lambda_min = 0.0;
  double khat_max = 0.0;
  double step_bound = 0.0;        // (γ / (M xi²))² ||K̂||²_max
  double cumulative_bound = 0.0;  // M times the step bound
};

// γ = (xi² / ε) (4N' / λ_min(K̂)), M = ceil(γ² ||K̂||²_max / (ε xi⁴)).
ParameterChoice SelectParameters(double epsilon_target, double xi, const DilatedMatrix& khat);

double WindowOverlapCalibration(Index n_padded, double xi, const HomodyneWindow& window);
double ReferenceNormCalibration(const BranchedHybridState& input, Index n_padded, const HomodyneWindow& window);

// <χ̂|(I + Z)/2 ⊗ X|χ̂> / calibration on a window-projected [flag, data] state.
double ReadoutExpectation(const BranchedHybridState& projected, double calibration);

struct RunReport {
  std::string version = kReportVersion;
  std::uint64_t seed = 0;
  std::string timestamp;

  double xi = 0.0;
  double gamma = 0.0;
  std::optional<double> zeta;
  std::int64_t steps = 0;
  Index n = 0;
  Index n_padded = 0;
  ExecutionPath path = ExecutionPath::kDirect;
  MeasurementMode mode = MeasurementMode::kExact;
  std::int64_t shots = 0;
  double epsilon_target = 0.0;
  int sign = +1;
  double window = 0.0;
  CalibrationMode calibration = CalibrationMode::kWindowOverlap;

  double classical_mean = 0.0;
  double classical_variance = 0.0;
  double kappa = 0.0;

  std::optional<double> mean_estimate;
  std::optional<double> variance_estimate;
  std::optional<double> rel_error;
  std::optional<double> variance_abs_error;

  std::optional<double> window_probability;
  std::optional<double> ancilla_probability;
  std::int64_t ancilla_success_count = 0;
  std::int64_t ancilla_trials = 0;
  std::int64_t window_accepted = 0;
  std::int64_t window_trials = 0;

  std::optional<double> trotter_trace_distance;
  std::optional<double> approx_bias;
  double trotter_step_bound = 0.0;
  double trotter_cumulative_bound = 0.0;
};

// Quantum estimate of uᵀ K⁻¹ v through the chosen path and mode.
struct InnerProductEstimate {
  double estimate = 0.0;
  double exact_estimate = 0.0;  // the noise-free value of the same path
  ReadoutMoments moments;
  std::optional<double> ancilla_probability;
  std::int64_t ancilla_success_count = 0;
  std::int64_t ancilla_trials = 0;
  std::int64_t window_accepted = 0;
  std::int64_t window_trials = 0;
  std::optional<double> trace_distance;
  std::optional<double> zeta;
};

InnerProductEstimate EstimateInnerProduct(const Vector& u, const Vector& v, const DilatedMatrix& khat,
                                          const ParameterChoice& params, const PipelineConfig& config,
                                          std::uint64_t stream);

RunReport RunMeanEstimation(const TrainingSet& data, const KernelSpec& kernel, const NoiseModel& noise,
                            const Vector& x_star, const PipelineConfig& config);
RunReport RunVarianceEstimation(const TrainingSet& data, const KernelSpec& kernel, const NoiseModel& noise,
                                const Vector& x_star, const PipelineConfig& config);

}  // namespace cvgpr

#endif  // CVGPR_PIPELINE_HPP_
