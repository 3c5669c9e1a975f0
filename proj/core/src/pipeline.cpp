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

#include "cvgpr/pipeline.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "cvgpr/encoding.hpp"
#include "cvgpr/error.hpp"
#include "cvgpr/oracle_protocol.hpp"

namespace cvgpr {

std::string PathName(ExecutionPath path) { return path == ExecutionPath::kDirect ? "direct" : "oracle"; }
std::string ModeName(MeasurementMode mode) { return mode == MeasurementMode::kExact ? "exact" : "sampled"; }
std::string CalibrationName(CalibrationMode mode) {
  return mode == CalibrationMode::kWindowOverlap ? "window-overlap" : "reference-norm";
}

ExecutionPath ParsePath(const std::string& name) {
  if (name == "direct") return ExecutionPath::kDirect;
  if (name == "oracle") return ExecutionPath::kOracle;
  throw InputError(fmt::format("unknown path '{}' (expected direct or oracle)", name));
}

MeasurementMode ParseMode(const std::string& name) {
  if (name == "exact") return MeasurementMode::kExact;
  if (name == "sampled") return MeasurementMode::kSampled;
  throw InputError(fmt::format("unknown mode '{}' (expected exact or sampled)", name));
}

CalibrationMode ParseCalibration(const std::string& name) {
  if (name == "window-overlap") return CalibrationMode::kWindowOverlap;
  if (name == "reference-norm") return CalibrationMode::kReferenceNorm;
  throw InputError(fmt::format("unknown calibration '{}' (expected window-overlap or reference-norm)", name));
}

void PipelineConfig::Validate() const {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError(fmt::format("xi must be positive, got {}", xi));
  if (!(epsilon_target > 0.0 && epsilon_target < 1.0)) {
    throw InputError(fmt::format("epsilon target must lie in (0, 1), got {}", epsilon_target));
  }
  if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma))) throw InputError(fmt::format("gamma must be positive, got {}", *gamma));
  if (steps && *steps < 1) throw InputError(fmt::format("step count must be at least 1, got {}", *steps));
  if (zeta && (!(*zeta > 0.0) || !std::isfinite(*zeta))) throw InputError(fmt::format("zeta must be positive, got {}", *zeta));
  if (shots < 1) throw InputError(fmt::format("shots must be at least 1, got {}", shots));
  if (sign != 1 && sign != -1) throw InputError("sign must be +1 or -1");
  if (window_half_width && !(*window_half_width > 0.0)) throw InputError("window half-width must be positive");
  if (retry_cap < 1) throw InputError("retry cap must be at least 1");
  if (lattice_cap < 0) throw InputError("lattice cap must be non-negative");
  if (!(condition_cap > 1.0)) throw InputError("condition cap must exceed 1");
  if (!(trace_tolerance > 0.0)) throw InputError("trace-distance tolerance must be positive");
}

namespace {

double SmallestEigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

std::int64_t StepsFor(double gamma, double khat_max, double epsilon, double xi) {
  const double m = std::ceil(gamma * gamma * khat_max * khat_max / (epsilon * std::pow(xi, 4)));
  if (!(m < 1e15)) {
    throw InputError(
        fmt::format("step count {:.3g} is out of range; raise sigma2, xi or epsilon, or pass gamma and steps", m));
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
}

void FillBounds(ParameterChoice& p, double xi) {
  const double r = p.gamma / (static_cast<double>(p.steps) * xi * xi);
  p.step_bound = r * r * p.khat_max * p.khat_max;
  p.cumulative_bound = static_cast<double>(p.steps) * p.step_bound;
}

}  // namespace

ParameterChoice SelectParameters(double epsilon_target, double xi, const DilatedMatrix& khat) {
  if (!(epsilon_target > 0.0 && epsilon_target < 1.0)) throw InputError("epsilon target must lie in (0, 1)");
  if (!(xi > 0.0)) throw InputError("xi must be positive");
  ParameterChoice p;
  p.lambda_min = SmallestEigenvalue(khat.khat);
  p.khat_max = MaxElementNorm(khat.khat);
  if (!(p.lambda_min > 0.0)) {
    throw ConditioningError(
        fmt::format("lambda_min(K̂) = {:.3g} is not positive; raise the noise variance (noise dilution) first",
                    p.lambda_min),
        std::numeric_limits<double>::infinity());
  }
  p.gamma = (xi * xi / epsilon_target) * (4.0 * static_cast<double>(khat.n_padded) / p.lambda_min);
  p.steps = StepsFor(p.gamma, p.khat_max, epsilon_target, xi);
  FillBounds(p, xi);
  return p;
}

double WindowOverlapCalibration(Index n_padded, double xi, const HomodyneWindow& window) {
  const double e = window.is_full() ? 1.0 : std::erf(window.half_width / (xi * std::sqrt(2.0)));
  return 2.0 * static_cast<double>(n_padded) * 2.0 * e * e;
}

double ReferenceNormCalibration(const BranchedHybridState& input, Index n_padded, const HomodyneWindow& window) {
  return 2.0 * static_cast<double>(n_padded) * WindowProject(input, window).second;
}

double ReadoutExpectation(const BranchedHybridState& projected, double calibration) {
  if (!(calibration != 0.0) || !std::isfinite(calibration)) {
    throw DegenerateRunError("readout calibration is zero");
  }
  const Index n_padded = projected.layout().RegisterDim(kDataRegister) / 2;
  return DiscreteExpectation(projected, ReadoutObservable(n_padded)) / calibration;
}

namespace {

ParameterChoice ResolveParameters(const PipelineConfig& config, const DilatedMatrix& khat) {
  ParameterChoice p = SelectParameters(config.epsilon_target, config.xi, khat);
  if (config.gamma) {
    p.gamma = *config.gamma;
    p.steps = StepsFor(p.gamma, p.khat_max, config.epsilon_target, config.xi);
  }
  if (config.steps) p.steps = *config.steps;
  FillBounds(p, config.xi);
  return p;
}

std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint64_t out[1];
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out[0];
}

ReadoutMoments DirectMoments(const BranchedHybridState& input, const DilatedMatrix& khat, double gamma, int sign,
                             const HomodyneWindow& window) {
  const BranchedHybridState evolved = ApplyDirectUnitary(input, gamma, khat, sign);
  const auto [projected, probability] = WindowProject(evolved, window);
  const Index n_padded = khat.n_padded;
  CMatrix top = CMatrix::Zero(2 * n_padded, 2 * n_padded);
  top.topLeftCorner(n_padded, n_padded).setIdentity();
  ReadoutMoments m;
  m.window_probability = probability;
  m.top_weight = DiscreteExpectation(projected, projected.layout().Embed(top, {kDataRegister}));
  m.raw = DiscreteExpectation(projected, ReadoutObservable(n_padded));
  return m;
}

}  // namespace

InnerProductEstimate EstimateInnerProduct(const Vector& u, const Vector& v, const DilatedMatrix& khat,
                                          const ParameterChoice& params, const PipelineConfig& config,
                                          std::uint64_t stream) {
  config.Validate();
  if (u.size() != khat.n_original || v.size() != khat.n_original) {
    throw InputError("vectors do not match the covariance dimension");
  }
  const HomodyneWindow window{config.window_half_width.value_or(config.xi)};
  const JointInput joint = BuildJointInput(u, v, config.xi, config.y_scale, config.k_scale);
  const Index n_padded = khat.n_padded;
  const double calibration = config.calibration == CalibrationMode::kWindowOverlap
                                 ? WindowOverlapCalibration(n_padded, config.xi, window)
                                 : ReferenceNormCalibration(joint.state, n_padded, window);
  if (!(calibration > 0.0)) throw DegenerateRunError("readout calibration is zero");
  const double rescale = static_cast<double>(n_padded) * params.gamma * joint.y.scale * joint.k_star.scale /
                         (2.0 * config.xi * config.xi);

  InnerProductEstimate out;
  std::int64_t queries_per_shot = 0;
  if (config.path == ExecutionPath::kDirect) {
    out.moments = DirectMoments(joint.state, khat, params.gamma, config.sign, window);
  } else {
    const double zeta = config.zeta.value_or(MaxElementNorm(khat.khat) / 8.0);
    out.zeta = zeta;
    const OneSparseDecomposition decomposition = BuildDecomposition(khat, zeta, config.quantization_cap);
    TrotterSchedule schedule{params.steps, params.gamma, zeta, config.sign};
    const OracleEngine engine(decomposition, khat.dim(), schedule);
    const bool fits = engine.HalfWidth() <= config.lattice_cap;
    if (config.mode == MeasurementMode::kSampled && !fits) {
      throw InputError(fmt::format(
          "sampled oracle runs need a population lattice of half-width {} but the cap is {}; lower the step count",
          engine.HalfWidth(), config.lattice_cap));
    }
    const CVector& input = joint.state.branches().front().amplitudes;
    out.moments = OracleReadout(engine, input, config.xi, window, fits);
    if (config.trace_distance) {
      out.trace_distance = MomentumResolvedTraceDistance(engine, khat, input, config.xi, config.trace_tolerance);
    }
    // Every fractional query succeeds with probability exactly 1/2.
    out.ancilla_probability = 0.5;
    queries_per_shot = params.steps * decomposition.term_count();
  }

  out.exact_estimate = out.moments.raw / calibration * rescale;
  if (config.mode == MeasurementMode::kExact) {
    out.estimate = out.exact_estimate;
    return out;
  }

  std::mt19937_64 rng(StreamSeed(config.seed, stream));
  const double p_plus = std::max(0.0, (out.moments.top_weight + out.moments.raw) / 2.0);
  const double p_minus = std::max(0.0, (out.moments.top_weight - out.moments.raw) / 2.0);
  const double p_accept = std::max(p_plus + p_minus, out.moments.window_probability);
  std::int64_t plus = 0, minus = 0;
  for (std::int64_t s = 0; s < config.shots; ++s) {
    for (std::int64_t q = 0; q < queries_per_shot; ++q) {
      std::int64_t attempts = 0;
      while (true) {
        ++attempts;
        ++out.ancilla_trials;
        if (UniformDouble(rng) < 0.5) break;
        if (attempts >= config.retry_cap) {
          throw DegenerateRunError(fmt::format("fractional query failed {} times in a row", attempts));
        }
      }
      ++out.ancilla_success_count;
    }
    const double r = UniformDouble(rng);
    ++out.window_trials;
    if (r < p_accept) ++out.window_accepted;
    if (r < p_plus) {
      ++plus;
    } else if (r < p_plus + p_minus) {
      ++minus;
    }
  }
  const double raw = static_cast<double>(plus - minus) / static_cast<double>(config.shots);
  out.estimate = raw / calibration * rescale;
  return out;
}

namespace {

RunReport BaseReport(const TrainingSet& data, const PipelineConfig& config, const ParameterChoice& params,
                     const DilatedMatrix& khat, const PosteriorResult& posterior) {
  RunReport r;
  r.seed = config.seed;
  r.xi = config.xi;
  r.gamma = params.gamma;
  r.steps = params.steps;
  r.n = data.size();
  r.n_padded = khat.n_padded;
  r.path = config.path;
  r.mode = config.mode;
  r.shots = config.mode == MeasurementMode::kSampled ? config.shots : 0;
  r.epsilon_target = config.epsilon_target;
  r.sign = config.sign;
  r.window = config.window_half_width.value_or(config.xi);
  r.calibration = config.calibration;
  r.classical_mean = posterior.mean;
  r.classical_variance = posterior.variance;
  r.kappa = posterior.condition_number;
  r.trotter_step_bound = params.step_bound;
  r.trotter_cumulative_bound = params.cumulative_bound;
  return r;
}

void FillProbabilities(RunReport& r, const InnerProductEstimate& est) {
  r.zeta = est.zeta;
  if (std::isfinite(est.moments.window_probability)) r.window_probability = est.moments.window_probability;
  r.ancilla_probability = est.ancilla_probability;
  r.ancilla_success_count = est.ancilla_success_count;
  r.ancilla_trials = est.ancilla_trials;
  r.window_accepted = est.window_accepted;
  r.window_trials = est.window_trials;
  r.trotter_trace_distance = est.trace_distance;
}

double RelativeTo(double estimate, double reference) {
  return std::abs(estimate - reference) / std::max(std::abs(reference), 1e-12);
}

struct Prepared {
  CovarianceSystem system;
  PosteriorResult posterior;
  DilatedMatrix khat;
  ParameterChoice params;
};

Prepared Prepare(const TrainingSet& data, const KernelSpec& kernel, const NoiseModel& noise, const Vector& x_star,
                 const PipelineConfig& config) {
  config.Validate();
  Prepared p;
  p.system = BuildCovarianceSystem(data, kernel, noise, x_star);
  p.posterior = ClassicalPosterior(p.system, data.targets, config.condition_cap);
  p.khat = EmbedKhat(p.system.K);
  p.params = ResolveParameters(config, p.khat);
  return p;
}

}  // namespace

RunReport RunMeanEstimation(const TrainingSet& data, const KernelSpec& kernel, const NoiseModel& noise,
                            const Vector& x_star, const PipelineConfig& config) {
  const Prepared p = Prepare(data, kernel, noise, x_star, config);
  RunReport r = BaseReport(data, config, p.params, p.khat, p.posterior);
  const InnerProductEstimate est = EstimateInnerProduct(data.targets, p.system.k_star, p.khat, p.params, config, 0);
  FillProbabilities(r, est);
  r.mean_estimate = est.estimate;
  r.rel_error = RelativeTo(est.estimate, p.posterior.mean);
  r.approx_bias = (est.exact_estimate - p.posterior.mean) / std::max(std::abs(p.posterior.mean), 1e-12);
  return r;
}

RunReport RunVarianceEstimation(const TrainingSet& data, const KernelSpec& kernel, const NoiseModel& noise,
                                const Vector& x_star, const PipelineConfig& config) {
  const Prepared p = Prepare(data, kernel, noise, x_star, config);
  RunReport r = BaseReport(data, config, p.params, p.khat, p.posterior);
  const InnerProductEstimate est = EstimateInnerProduct(p.system.k_star, p.system.k_star, p.khat, p.params, config, 1);
  FillProbabilities(r, est);
  r.variance_estimate = p.system.k_star_star - est.estimate;
  r.variance_abs_error = std::abs(*r.variance_estimate - p.posterior.variance);
  return r;
}

}  // namespace cvgpr
