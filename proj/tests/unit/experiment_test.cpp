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

#include "cvgpr/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cvgpr/error.hpp"
#include "support.hpp"

namespace cvgpr {
namespace {

TrainingSet Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseDataset(in, "test.csv");
}

ExperimentConfig TwoPointConfig() {
  ExperimentConfig c;
  c.synthetic = {2, 1, 3};
  c.noise.sigma2 = 0.5;
  c.x_star = Vector::Constant(1, 0.2);
  return c;
}

TEST(DatasetTest, ParsesValidCsv) {
  const TrainingSet d = Parse("x1,x2,y\n0.5,-1,2.25\n1e-3, 4 ,-0.5\n");
  ASSERT_EQ(d.size(), 2);
  EXPECT_EQ(d.dimension(), 2);
  EXPECT_EQ(d.inputs[1](0), 1e-3);
  EXPECT_EQ(d.inputs[1](1), 4.0);
  EXPECT_EQ(d.targets(0), 2.25);
}

TEST(DatasetTest, SkipsBlankLinesAndByteOrderMark) {
  const TrainingSet d = Parse("\xEF\xBB\xBFx1,y\r\n\n0,1\r\n");
  EXPECT_EQ(d.size(), 1);
}

TEST(DatasetTest, HeaderOnlyIsEmpty) {
  try {
    Parse("x1,y\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("no observations"), std::string::npos);
  }
  EXPECT_THROW(Parse(""), InputError);
}

TEST(DatasetTest, TextInNumericColumnNamesTheLine) {
  try {
    Parse("x1,y\n0,1\n0.5,abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(DatasetTest, RejectsNonFiniteAndBadHeaders) {
  EXPECT_THROW(Parse("x1,y\nnan,1\n"), ParseError);
  EXPECT_THROW(Parse("x1,y\n1,inf\n"), ParseError);
  EXPECT_THROW(Parse("a,y\n1,1\n"), ParseError);
  EXPECT_THROW(Parse("x1,target\n1,1\n"), ParseError);
}

TEST(DatasetTest, InconsistentDimensionIsSchemaError) {
  EXPECT_THROW(Parse("x1,x2,y\n1,2,3\n1,2\n"), SchemaError);
}

TEST(DatasetTest, MissingFile) { EXPECT_THROW(LoadDataset("/nonexistent/data.csv"), InputError); }

TEST(DatasetTest, WriteRoundTripsExactly) {
  std::mt19937_64 rng(1);
  const TrainingSet d = testing::RandomTrainingSet(rng, 7, 3);
  std::ostringstream out;
  WriteDatasetCsv(out, d);
  const TrainingSet back = Parse(out.str());
  ASSERT_EQ(back.size(), 7);
  for (Index i = 0; i < 7; ++i) EXPECT_EQ(back.inputs[i], d.inputs[i]);
  EXPECT_EQ(back.targets, d.targets);
}

TEST(SyntheticTest, Deterministic) {
  const SyntheticSpec spec{12, 2, 99};
  const SyntheticDataset a = GenerateSynthetic(spec, {}, {0.1});
  const SyntheticDataset b = GenerateSynthetic(spec, {}, {0.1});
  for (Index i = 0; i < 12; ++i) {
    EXPECT_EQ(a.data.inputs[i], b.data.inputs[i]);
    EXPECT_LE(a.data.inputs[i].cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_EQ(a.data.targets, b.data.targets);
  const SyntheticDataset c = GenerateSynthetic({12, 2, 100}, {}, {0.1});
  EXPECT_NE(a.data.targets, c.data.targets);
  EXPECT_THROW(GenerateSynthetic({0, 1, 1}, {}, {0.1}), InputError);
}

TEST(SyntheticTest, SinglePointPriorVariance) {
  const std::vector<Vector> x = {Vector::Constant(1, 0.3)};
  const KernelSpec kernel{KernelFamily::kSquaredExponential, 1.0, 1.7};
  const int samples = 20000;
  double sum = 0.0, sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = SampleGpTargets(x, kernel, 0.0, static_cast<std::uint64_t>(s))(0);
    sum += t;
    sq += t * t;
  }
  const double var = sq / samples;
  EXPECT_NEAR(sum / samples, 0.0, 4.0 * std::sqrt(1.7 / samples));
  EXPECT_NEAR(var, 1.7, 4.0 * 1.7 * std::sqrt(2.0 / samples));
}

// Sample covariance over 1000 seeds against the Gram matrix, entry by entry.
TEST(SyntheticTest, MonteCarloCovarianceMatchesGram) {
  const Index n = 100;
  const int seeds = 1000;
  const double sigma2 = 0.01;
  std::mt19937_64 rng(5);
  std::vector<Vector> x;
  for (Index i = 0; i < n; ++i) x.push_back(Vector::Constant(1, testing::Uniform(rng, -1, 1)));
  const KernelSpec kernel;
  Matrix gram(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) gram(i, j) = testing::SquaredExponential(x[i], x[j], 1.0, 1.0) + (i == j ? sigma2 : 0.0);
  }
  Matrix acc = Matrix::Zero(n, n);
  for (int s = 0; s < seeds; ++s) {
    const Vector t = SampleGpTargets(x, kernel, sigma2, static_cast<std::uint64_t>(s) + 1000);
    acc.noalias() += t * t.transpose();
  }
  acc /= seeds;
  int outside = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double se = std::sqrt((gram(i, i) * gram(j, j) + gram(i, j) * gram(i, j)) / seeds);
      if (std::abs(acc(i, j) - gram(i, j)) > 3.0 * se) ++outside;
    }
  }
  // Entries are strongly correlated; a 3σ band should still hold for nearly all of them.
  EXPECT_LE(outside, n * n / 100);
}

TEST(ConfigTest, ParsesSectionsAndOverrides) {
  std::istringstream in(
      "[data]\nn = 4\nseed = 11\n[model]\nkernel = linear\nsigma2 = 0.2\nx_star = 0.1, -0.2\n"
      "[quantum]\nxi = 0.3\npath = oracle\nmode = sampled\nshots = 500\nsteps = 8\ngamma = 1.5\n"
      "[output]\nvariance = false\nname = run1\n");
  ExperimentConfig c = ParseConfig(in);
  EXPECT_EQ(c.synthetic.n, 4);
  EXPECT_EQ(c.synthetic.seed, 11u);
  EXPECT_EQ(c.kernel.family, KernelFamily::kLinear);
  EXPECT_DOUBLE_EQ(c.noise.sigma2, 0.2);
  ASSERT_TRUE(c.x_star.has_value());
  EXPECT_EQ(c.x_star->size(), 2);
  EXPECT_DOUBLE_EQ(c.pipeline.xi, 0.3);
  EXPECT_EQ(c.pipeline.path, ExecutionPath::kOracle);
  EXPECT_EQ(c.pipeline.mode, MeasurementMode::kSampled);
  EXPECT_EQ(*c.pipeline.steps, 8);
  EXPECT_FALSE(c.variance);
  EXPECT_EQ(c.output_name, "run1");
  ApplyConfigValue(c, "quantum.xi", "0.7");
  EXPECT_DOUBLE_EQ(c.pipeline.xi, 0.7);
}

TEST(ConfigTest, InlineCommentsAreStripped) {
  std::istringstream in("[data]\nn = 3   ; training points\n[model]\nkernel = constant\t# flat\n");
  const ExperimentConfig c = ParseConfig(in);
  EXPECT_EQ(c.synthetic.n, 3);
  EXPECT_EQ(c.kernel.family, KernelFamily::kConstant);
}

TEST(ConfigTest, Errors) {
  ExperimentConfig c;
  EXPECT_THROW(ApplyConfigValue(c, "quantum.colour", "red"), InputError);
  EXPECT_THROW(ApplyConfigValue(c, "quantum.xi", "fast"), InputError);
  EXPECT_THROW(ApplyConfigValue(c, "quantum.shots", "1.5"), InputError);
  EXPECT_THROW(ApplyConfigValue(c, "output.variance", "maybe"), InputError);
  std::istringstream bad("[quantum\nxi=1\n");
  EXPECT_THROW(ParseConfig(bad), ParseError);
  std::istringstream loose("xi = 1\n");
  EXPECT_THROW(ParseConfig(loose), InputError);
  EXPECT_FALSE(ConfigKeys().empty());
}

TEST(ExperimentTest, MinimalSinglePointRun) {
  ExperimentConfig c;
  c.synthetic = {1, 1, 1};
  c.noise.sigma2 = 0.1;
  const RunReport r = RunExperiment(c);
  ASSERT_TRUE(r.rel_error.has_value());
  EXPECT_LT(*r.rel_error, 0.05);
  EXPECT_TRUE(r.variance_estimate.has_value());
}

TEST(ExperimentTest, InvalidXiIsInputError) {
  ExperimentConfig c = TwoPointConfig();
  c.pipeline.xi = -1.0;
  EXPECT_THROW(RunExperiment(c), InputError);
}

TEST(ExperimentTest, TestPointDimensionMustMatch) {
  ExperimentConfig c = TwoPointConfig();
  c.x_star = Vector::Zero(3);
  EXPECT_THROW(RunExperiment(c), InputError);
}

TEST(ReportTest, JsonIsDeterministicAndComplete) {
  ExperimentConfig c = TwoPointConfig();
  c.pipeline.mode = MeasurementMode::kSampled;
  c.pipeline.shots = 2000;
  const std::string a = ReportJson(RunExperiment(c, "2026-01-01T00:00:00Z"), false);
  const std::string b = ReportJson(RunExperiment(c, "2026-06-01T00:00:00Z"), false);
  EXPECT_EQ(a, b);
  for (const char* key : {"\"version\"", "\"seed\"", "\"params\"", "\"classical\"", "\"kappa\"", "\"quantum\"",
                          "\"relError\"", "\"probabilities\"", "\"window\"", "\"ancilla\"", "\"errors\"",
                          "\"trotterTraceDistance\"", "\"approxBias\""}) {
    EXPECT_NE(a.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(a.find("timestamp"), std::string::npos);
  const std::string with = ReportJson(RunExperiment(c, "2026-01-01T00:00:00Z"));
  EXPECT_NE(with.find("2026-01-01T00:00:00Z"), std::string::npos);
}

TEST(ReportTest, CsvRowMatchesHeader) {
  const RunReport r = RunExperiment(TwoPointConfig(), "t");
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(count(ReportCsvHeader()), count(ReportCsvRow(r)));
}

TEST(ReportTest, WritesFiles) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "cvgpr_report_test";
  std::filesystem::remove_all(dir);
  WriteReport(RunExperiment(TwoPointConfig(), "t"), dir.string(), "r");
  EXPECT_TRUE(std::filesystem::exists(dir / "r.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "r.csv"));
  std::filesystem::remove_all(dir);
}

TEST(SweepTest, WritesFilesIntoNewDirectory) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "cvgpr_sweep_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  SweepSpec s;
  s.base = TwoPointConfig();
  s.axis = SweepAxis::kXi;
  s.values = {0.1, 0.2};
  WriteSweep(RunSweep(s), dir.string(), "s");
  EXPECT_TRUE(std::filesystem::exists(dir / "s_sweep.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "s_sweep.json"));
  std::filesystem::remove_all(dir.parent_path());
}

TEST(ReportTest, ErrorJson) {
  EXPECT_EQ(ErrorJson("input", "bad xi", 2), "{\"error\":{\"kind\":\"input\",\"message\":\"bad xi\",\"exitCode\":2}}\n");
}

TEST(ReportTest, ClassicalJson) {
  const std::string j = ClassicalJson(TwoPointConfig());
  EXPECT_NE(j.find("\"kStarStar\""), std::string::npos);
}

TEST(SlopeTest, RecoversPowerLaw) {
  const std::vector<double> x = {1, 10, 100, 1000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  EXPECT_NEAR(*FitLogLogSlope(x, y), -0.5, 1e-12);
  EXPECT_FALSE(FitLogLogSlope({1.0}, {2.0}).has_value());
  EXPECT_FALSE(FitLogLogSlope({1.0, 2.0}, {0.0, -1.0}).has_value());
}

TEST(SweepTest, Validation) {
  SweepSpec s;
  s.base = TwoPointConfig();
  EXPECT_THROW(s.Validate(), InputError);
  s.values = {2, 1};
  EXPECT_THROW(s.Validate(), InputError);
  s.values = {1.5};
  EXPECT_THROW(s.Validate(), InputError);
  s.axis = SweepAxis::kXi;
  EXPECT_NO_THROW(s.Validate());
  EXPECT_EQ(ParseAxis("epsilon"), SweepAxis::kEpsilon);
  EXPECT_THROW(ParseAxis("lambda"), InputError);
  s.axis = SweepAxis::kShots;
  s.values = {100};
  EXPECT_EQ(ConfigForPoint(s, 100).pipeline.mode, MeasurementMode::kSampled);
}

TEST(SweepTest, SingleValueDegeneratesToRun) {
  SweepSpec s;
  s.base = TwoPointConfig();
  s.axis = SweepAxis::kXi;
  s.values = {0.2};
  const SweepResult r = RunSweep(s, "t");
  ASSERT_EQ(r.points.size(), 1u);
  ExperimentConfig c = TwoPointConfig();
  c.pipeline.xi = 0.2;
  EXPECT_EQ(ReportJson(*r.points[0].report), ReportJson(RunExperiment(c, "t")));
  EXPECT_FALSE(r.slope.has_value());
}

TEST(SweepTest, FailuresAreRecordedAndSweepContinues) {
  SweepSpec s;
  s.base = TwoPointConfig();
  s.axis = SweepAxis::kEpsilon;
  s.values = {0.05, 0.1, 2.0};
  const SweepResult r = RunSweep(s);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_FALSE(r.points[0].error.has_value());
  EXPECT_FALSE(r.points[1].error.has_value());
  ASSERT_TRUE(r.points[2].error.has_value());
  EXPECT_NE(r.points[2].error->find("input"), std::string::npos);
  const std::string csv = SweepCsv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "axis_value,relError,traceDistance,windowProb,ancillaAcceptance,stdError,error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

ExperimentConfig OracleInstance() {
  // Constant kernel: K = [[1, 0.5], [0.5, 1]] quantizes exactly at zeta = 0.25.
  ExperimentConfig c;
  c.synthetic = {2, 1, 1};
  c.kernel = {KernelFamily::kConstant, 1.0, 0.5};
  c.noise.sigma2 = 0.5;
  c.pipeline.xi = 1.0;
  c.pipeline.gamma = 2.0;
  c.pipeline.zeta = 0.25;
  c.pipeline.path = ExecutionPath::kOracle;
  c.variance = false;
  return c;
}

TEST(SweepTest, StepSweepSlope) {
  SweepSpec s;
  s.base = OracleInstance();
  s.axis = SweepAxis::kSteps;
  s.values = {16, 32, 64, 128};
  const SweepResult r = RunSweep(s);
  EXPECT_EQ(r.slope_metric, "traceDistance");
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_GE(*r.slope, -1.3);
  EXPECT_LE(*r.slope, -0.7);
  EXPECT_DOUBLE_EQ(*r.points[0].ancilla_acceptance, 0.5);
}

TEST(SweepTest, ShotSweepSlope) {
  SweepSpec s;
  s.base = TwoPointConfig();
  s.base.variance = false;
  s.axis = SweepAxis::kShots;
  s.values = {1000, 10000, 100000};
  s.repetitions = 100;
  const SweepResult r = RunSweep(s);
  EXPECT_EQ(r.slope_metric, "stdError");
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_NEAR(*r.slope, -0.5, 0.1);
}

}  // namespace
}  // namespace cvgpr
