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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails or overruns its time budget.
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "cvgpr/dilation.hpp"
#include "cvgpr/encoding.hpp"
#include "cvgpr/experiment.hpp"
#include "cvgpr/gpr.hpp"
#include "cvgpr/grid_oracle.hpp"
#include "cvgpr/hybrid_state.hpp"
#include "cvgpr/oracle_protocol.hpp"
#include "cvgpr/pipeline.hpp"
#include "support.hpp"

namespace cvgpr {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ClassicalOracle() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = Index{1} << (trial % 3);
    const Index d = 1 + (trial / 3) % 2;
    const TrainingSet data = testing::RandomTrainingSet(rng, n, d);
    const KernelSpec kernel{KernelFamily::kSquaredExponential, testing::Uniform(rng, 0.3, 2.0), 1.0};
    Vector x(d);
    for (Index k = 0; k < d; ++k) x(k) = testing::Uniform(rng, -1, 1);
    const CovarianceSystem s = BuildCovarianceSystem(data, kernel, {testing::Uniform(rng, 0.05, 1.0)}, x);
    const PosteriorResult p = ClassicalPosterior(s, data.targets);
    const Matrix inv = testing::CofactorInverse(s.K);
    const double mean = s.k_star.dot(inv * data.targets);
    const double var = s.k_star_star - s.k_star.dot(inv * s.k_star);
    worst = std::max(worst, std::abs(p.mean - mean) / std::max(std::abs(mean), 1e-300));
    worst = std::max(worst, std::abs(p.variance - var) / std::max(std::abs(var), 1e-300));
  }
  return {worst <= 1e-10, fmt::format("max relative error {:.3e} (limit 1e-10)", worst)};
}

Outcome DecompositionExactness() {
  std::mt19937_64 rng(1002);
  bool ok = true;
  double worst_residual = 0.0;
  std::int64_t max_entry = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = Index{1} << (trial % 3);
    const DilatedMatrix khat = EmbedKhat(testing::RandomSpd(rng, n, 0.1, 3.0));
    // max|H̃| = 2 floor(max|H| / 2ζ) <= 20 whenever ζ >= max|H| / 20.
    const double zeta = MaxElementNorm(khat.khat) / testing::Uniform(rng, 1.0, 20.0);
    const OneSparseDecomposition dec = BuildDecomposition(khat, zeta);
    max_entry = std::max(max_entry, dec.htilde.MaxAbs());
    const Index dim = khat.dim() * khat.dim();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& term : dec.terms) {
      const Matrix t = term.Dense();
      ok = ok && (t * t == Matrix::Identity(dim, dim));
      sum += t;
    }
    ok = ok && (sum == dec.htilde.Dense());
    const Matrix h = HermitianDilation(khat).Dense();
    const double residual = (h - zeta * dec.htilde.Dense()).cwiseAbs().maxCoeff() / zeta;
    worst_residual = std::max(worst_residual, residual);
  }
  ok = ok && worst_residual <= 2.0 && max_entry <= 20;
  return {ok, fmt::format("sum and squares exact={}, max|H - zeta H~|/zeta = {:.4f} (limit 2), max|H~| = {}",
                          ok ? "yes" : "no", worst_residual, max_entry)};
}

Outcome WindowProbability() {
  double worst = 0.0;
  for (double xi : {0.05, 0.1, 1.0}) {
    Vector y(2), k(2);
    y << 0.4, -0.9;
    k << 0.7, 0.2;
    const JointInput in = BuildJointInput(y, k, xi);
    Matrix km(2, 2);
    km << 1.0, 0.3, 0.3, 1.0;
    const BranchedHybridState evolved = ApplyDirectUnitary(in.state, 0.0, EmbedKhat(km));
    const double p = WindowProject(evolved, HomodyneWindow::FromXi(xi)).second;
    worst = std::max(worst, std::abs(p - std::pow(std::erf(1.0), 2)));
  }
  return {worst <= 1e-6, fmt::format("max |P - erf^2(1)| = {:.3e} with erf^2(1) = {:.6f} (limit 1e-6)", worst,
                                     std::pow(std::erf(1.0), 2))};
}

Outcome AncillaPostSelection() {
  Matrix k(2, 2);
  k << 1.0, 0.5, 0.5, 1.0;
  const OneSparseDecomposition dec = BuildDecomposition(EmbedKhat(k), 0.25);
  const OracleQ q(dec.terms);
  const RegisterLayout layout({{kAncillaRegister, 2}, {kIndexRegister, q.index_dim()}, {kFlagRegister, 2},
                               {kDataRegister, 4}, {kSwapRegister, 4}});
  std::mt19937_64 rng(1004);
  CVector rest(layout.dim() / 2);
  for (Index i = 0; i < rest.size(); ++i) rest(i) = Complex(testing::Uniform(rng, -1, 1), testing::Uniform(rng, -1, 1));
  rest.normalize();
  CVector v(layout.dim());
  v.head(rest.size()) = rest / std::sqrt(2.0);
  v.tail(rest.size()) = rest / std::sqrt(2.0);
  const auto out = FractionalQuery(BranchedHybridState::Product(layout, v, 0.1), q, 0.0);
  const double err = std::abs(out.probability - 0.5);
  return {err <= 1e-9, fmt::format("success probability {:.12f} (target 0.5 +- 1e-9)", out.probability)};
}

Outcome GridAgreement() {
  double worst = 0.0;
  for (double xi : {0.05, 0.1, 1.0}) {
    const WavefunctionGrid psi = WavefunctionGrid::Sample(
        512, 0.25 * xi, [xi](double q, double qt) { return GaussianPair(xi, 0.0).Wavefunction(q, qt); });
    for (double gamma : {0.1, 1.0, 10.0}) {
      for (double lambda : {0.0, 0.25, 1.0, 4.0}) {
        const WavefunctionGrid out = GridOracleEvolve(psi, lambda, gamma);
        const double l2 = GridL2Distance(
            out, [&](double q, double qt) { return OverlapClosedForm(lambda, xi, gamma, q, qt); });
        worst = std::max(worst, l2);
      }
    }
  }
  return {worst < 1e-6, fmt::format("max L2 error {:.3e} over 36 cases on 512^2 grids (limit 1e-6)", worst)};
}

Outcome EndToEnd() {
  std::mt19937_64 rng(1006);
  double worst_mean = 0.0, worst_var = 0.0, worst_kappa = 0.0;
  for (Index n : {1, 2, 4}) {
    for (int trial = 0; trial < 4; ++trial) {
      const TrainingSet data = testing::RandomTrainingSet(rng, n, 1);
      const KernelSpec kernel;
      const Matrix k0 = BuildCovarianceSystem(data, kernel, {0.0}, Vector::Zero(1)).K;
      const Vector e = Eigen::SelfAdjointEigenSolver<Matrix>(k0).eigenvalues();
      const double sigma2 = std::max(0.0, (e.maxCoeff() - 10.0 * e.minCoeff()) / 9.0) * 1.05 + 1e-3;
      const Vector x = Vector::Constant(1, testing::Uniform(rng, -1, 1));
      PipelineConfig config;
      config.epsilon_target = 0.05;
      const RunReport m = RunMeanEstimation(data, kernel, {sigma2}, x, config);
      const RunReport v = RunVarianceEstimation(data, kernel, {sigma2}, x, config);
      const double kss = BuildCovarianceSystem(data, kernel, {sigma2}, x).k_star_star;
      worst_mean = std::max(worst_mean, *m.rel_error);
      worst_var = std::max(worst_var, *v.variance_abs_error / kss);
      worst_kappa = std::max(worst_kappa, m.kappa);
    }
  }
  const bool ok = worst_mean < 0.05 && worst_var < 0.05 && worst_kappa <= 10.0;
  return {ok, fmt::format("max mean relError {:.3e}, max variance error / k** {:.3e} (limits 0.05), max kappa {:.2f}",
                          worst_mean, worst_var, worst_kappa)};
}

Outcome TrotterScaling() {
  SweepSpec s;
  s.base.synthetic = {2, 1, 7};
  s.base.kernel = {KernelFamily::kConstant, 1.0, 0.5};
  s.base.noise.sigma2 = 0.5;
  s.base.pipeline.xi = 1.0;
  s.base.pipeline.gamma = 2.0;
  s.base.pipeline.zeta = 0.25;
  s.base.pipeline.path = ExecutionPath::kOracle;
  s.base.variance = false;
  s.axis = SweepAxis::kSteps;
  s.values = {16, 32, 64, 128};
  const SweepResult r = RunSweep(s);
  std::string td;
  for (const auto& p : r.points) td += fmt::format(" {:.3e}", p.trace_distance.value_or(std::nan("")));
  const bool ok = r.slope && *r.slope >= -1.3 && *r.slope <= -0.7;
  return {ok, fmt::format("slope {:.4f} (range [-1.3, -0.7]); trace distances{}", r.slope.value_or(std::nan("")), td)};
}

Outcome ShotNoiseScaling() {
  SweepSpec s;
  s.base.synthetic = {2, 1, 8};
  s.base.noise.sigma2 = 0.5;
  s.base.pipeline.xi = 1.0;
  s.base.pipeline.gamma = 20.0;
  s.base.pipeline.steps = 1;
  s.base.variance = false;
  s.axis = SweepAxis::kShots;
  s.values = {1e3, 1e4, 1e5};
  s.repetitions = 200;
  const SweepResult r = RunSweep(s);
  std::string se;
  for (const auto& p : r.points) se += fmt::format(" {:.3e}", p.std_error.value_or(std::nan("")));
  const bool ok = r.slope && std::abs(*r.slope + 0.5) <= 0.1;
  return {ok, fmt::format("slope {:.4f} (target -0.5 +- 0.1); standard errors{}", r.slope.value_or(std::nan("")), se)};
}

Outcome Determinism() {
  bool ok = true;
  std::vector<ExperimentConfig> configs(3);
  configs[0].synthetic = {3, 2, 5};
  configs[0].noise.sigma2 = 0.3;
  configs[1] = configs[0];
  configs[1].pipeline.mode = MeasurementMode::kSampled;
  configs[1].pipeline.shots = 5000;
  configs[1].pipeline.seed = 77;
  configs[2].synthetic = {2, 1, 9};
  configs[2].kernel = {KernelFamily::kConstant, 1.0, 0.5};
  configs[2].noise.sigma2 = 0.5;
  configs[2].pipeline.xi = 1.0;
  configs[2].pipeline.gamma = 2.0;
  configs[2].pipeline.zeta = 0.25;
  configs[2].pipeline.steps = 8;
  configs[2].pipeline.path = ExecutionPath::kOracle;
  configs[2].pipeline.mode = MeasurementMode::kSampled;
  configs[2].pipeline.shots = 2000;
  for (const auto& c : configs) {
    const std::string a = ReportJson(RunExperiment(c, CurrentTimestamp()), false);
    const std::string b = ReportJson(RunExperiment(c, CurrentTimestamp()), false);
    ok = ok && a == b;
  }
  SweepSpec s;
  s.base = configs[1];
  s.axis = SweepAxis::kShots;
  s.values = {100, 1000};
  s.repetitions = 3;
  ok = ok && SweepCsv(RunSweep(s)) == SweepCsv(RunSweep(s));
  return {ok, "exact, sampled and oracle-sampled runs plus a sweep repeated with the same seed"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace cvgpr

int main() {
  using namespace cvgpr;
  const std::vector<Criterion> criteria = {
      {1, "classical oracle correctness", 1.0, ClassicalOracle},
      {2, "decomposition exactness", 1.0, DecompositionExactness},
      {3, "homodyne window probability", 1.0, WindowProbability},
      {4, "ancilla post-selection", 1.0, AncillaPostSelection},
      {5, "closed form vs grid oracle", 60.0, GridAgreement},
      {6, "end-to-end mean and variance", 120.0, EndToEnd},
      {7, "Trotter scaling", 300.0, TrotterScaling},
      {8, "shot-noise scaling", 300.0, ShotNoiseScaling},
      {9, "determinism", 300.0, Determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("threw: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failures;
    fmt::print("criterion {}: {} {}: {} [{:.2f} s, budget {:.0f} s{}]\n", c.id, pass ? "PASS" : "FAIL", c.name,
               outcome.detail, seconds, c.budget_seconds, in_time ? "" : ", over budget");
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
