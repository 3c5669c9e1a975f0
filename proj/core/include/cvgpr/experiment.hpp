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

#ifndef CVGPR_EXPERIMENT_HPP_
#define CVGPR_EXPERIMENT_HPP_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cvgpr/error.hpp"
#include "cvgpr/gpr.hpp"
#include "cvgpr/pipeline.hpp"

namespace cvgpr {

// CSV with header `x1,...,xd,y`. `source` only labels error messages.
TrainingSet ParseDataset(std::istream& in, const std::string& source = "<stream>");
TrainingSet LoadDataset(const std::string& path);
void WriteDatasetCsv(std::ostream& out, const TrainingSet& data);

struct SyntheticSpec {
  Index n = 8;
  Index d = 1;
  std::uint64_t seed = 1;

  void Validate() const;
};

struct SyntheticDataset {
  TrainingSet data;
  bool regularized = false;  // the Gram matrix needed a 1e-10 I shift
};

// Exact draw from N(0, K + sigma2 I) through a Cholesky factor of the Gram matrix.
Vector SampleGpTargets(const std::vector<Vector>& inputs, const KernelSpec& kernel, double sigma2,
                       std::uint64_t seed, bool* regularized = nullptr);

// Inputs uniform on [-1, 1]^d, targets from the prior plus noise.
SyntheticDataset GenerateSynthetic(const SyntheticSpec& spec, const KernelSpec& kernel, const NoiseModel& noise);

struct ExperimentConfig {
  std::optional<std::string> dataset_path;  // synthetic data when empty
  SyntheticSpec synthetic;
  std::optional<Vector> x_star;  // defaults to the origin
  KernelSpec kernel;
  NoiseModel noise;
  PipelineConfig pipeline;
  bool variance = true;
  std::string output_dir;
  std::string output_name = "report";

  void Validate() const;
};

// Sets one `section.key` value. Keys:
//   data.path data.n data.d data.seed
//   model.kernel model.length_scale model.amplitude model.sigma2 model.x_star
//   quantum.xi quantum.zeta quantum.epsilon quantum.gamma quantum.steps quantum.path quantum.mode
//   quantum.shots quantum.seed quantum.sign quantum.window quantum.calibration quantum.retry_cap
//   quantum.lattice_cap quantum.condition_cap quantum.quantization_cap quantum.trace_distance
//   quantum.trace_tolerance
//   output.dir output.name output.variance
void ApplyConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> ConfigKeys();

// INI text: `[section]` headers and `key = value` lines.
ExperimentConfig ParseConfig(std::istream& in, ExperimentConfig base = {});
ExperimentConfig LoadConfig(const std::string& path, ExperimentConfig base = {});

TrainingSet ResolveDataset(const ExperimentConfig& config, bool* regularized = nullptr);
Vector ResolveTestPoint(const ExperimentConfig& config, Index dimension);

// Mean estimation, then variance estimation when enabled; the report carries both.
RunReport RunExperiment(const ExperimentConfig& config, const std::string& timestamp = "");

std::string CurrentTimestamp();

std::string ReportJson(const RunReport& report, bool include_timestamp = true);
std::string ReportCsvHeader();
std::string ReportCsvRow(const RunReport& report);
// Writes <dir>/<name>.json and <dir>/<name>.csv.
void WriteReport(const RunReport& report, const std::string& dir, const std::string& name);

std::string ClassicalJson(const ExperimentConfig& config);
std::string ErrorJson(const std::string& kind, const std::string& message, int exit_code);

enum class SweepAxis { kSteps, kXi, kGamma, kEpsilon, kShots };
std::string AxisName(SweepAxis axis);
SweepAxis ParseAxis(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kSteps;
  std::vector<double> values;
  ExperimentConfig base;
  // Runs per point with seeds seed, seed + 1, ...; the spread of the mean estimates
  // gives the standard error column.
  std::int64_t repetitions = 1;

  void Validate() const;
};

ExperimentConfig ConfigForPoint(const SweepSpec& spec, double value);

struct SweepPoint {
  double axis_value = 0.0;
  std::optional<RunReport> report;  // first repetition
  std::optional<std::string> error;
  std::optional<double> rel_error;
  std::optional<double> trace_distance;
  std::optional<double> window_probability;
  std::optional<double> ancilla_acceptance;
  std::optional<double> std_error;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kSteps;
  std::vector<SweepPoint> points;
  std::string slope_metric;
  std::optional<double> slope;
};

// Per-point failures are recorded and the sweep continues.
SweepResult RunSweep(const SweepSpec& spec, const std::string& timestamp = "");
std::string SweepCsv(const SweepResult& result);
std::string SweepJson(const SweepResult& result, bool include_timestamp = true);
// Writes <dir>/<name>_sweep.csv and .json, creating the directory.
void WriteSweep(const SweepResult& result, const std::string& dir, const std::string& name);

// Least-squares slope of log y against log x; nullopt with fewer than two usable points.
std::optional<double> FitLogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cvgpr

#endif  // CVGPR_EXPERIMENT_HPP_
