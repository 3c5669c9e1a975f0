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

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "cvgpr/oracle_protocol.hpp"

namespace cvgpr {

namespace {

using Json = nlohmann::ordered_json;

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitFields(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(Trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> ToDouble(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

TrainingSet ParseDataset(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  TrainingSet out;
  std::vector<double> targets;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = SplitFields(line);
    if (columns == 0) {
      if (fields.size() < 2 || fields.back() != "y") {
        throw ParseError(fmt::format("{}: header must read x1,...,xd,y", source), line_no);
      }
      for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
        if (fields[i] != fmt::format("x{}", i + 1)) {
          throw ParseError(fmt::format("{}: expected header column 'x{}', found '{}'", source, i + 1, fields[i]),
                           line_no);
        }
      }
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      throw SchemaError(fmt::format("{}: line {}: expected {} columns, found {}", source, line_no, columns,
                                    fields.size()));
    }
    Vector x(static_cast<Index>(columns - 1));
    for (std::size_t i = 0; i < columns; ++i) {
      const std::optional<double> v = ToDouble(fields[i]);
      if (!v) throw ParseError(fmt::format("{}: '{}' is not a number", source, fields[i]), line_no);
      if (!std::isfinite(*v)) throw ParseError(fmt::format("{}: non-finite value '{}'", source, fields[i]), line_no);
      if (i + 1 < columns) {
        x(static_cast<Index>(i)) = *v;
      } else {
        targets.push_back(*v);
      }
    }
    out.inputs.push_back(std::move(x));
  }
  if (columns == 0) throw InputError(fmt::format("{}: dataset is empty", source));
  if (out.inputs.empty()) throw InputError(fmt::format("{}: dataset has a header but no observations", source));
  out.targets = Eigen::Map<const Vector>(targets.data(), static_cast<Index>(targets.size()));
  return out;
}

TrainingSet LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open dataset '{}'", path));
  return ParseDataset(in, path);
}

void WriteDatasetCsv(std::ostream& out, const TrainingSet& data) {
  data.Validate();
  for (Index i = 0; i < data.dimension(); ++i) out << "x" << (i + 1) << ",";
  out << "y\n";
  for (Index r = 0; r < data.size(); ++r) {
    for (Index i = 0; i < data.dimension(); ++i) out << fmt::format("{},", data.inputs[r](i));
    out << fmt::format("{}\n", data.targets(r));
  }
}

void SyntheticSpec::Validate() const {
  if (n < 1) throw InputError(fmt::format("synthetic N must be at least 1, got {}", n));
  if (d < 1) throw InputError(fmt::format("synthetic d must be at least 1, got {}", d));
}

Vector SampleGpTargets(const std::vector<Vector>& inputs, const KernelSpec& kernel, double sigma2,
                       std::uint64_t seed, bool* regularized) {
  kernel.Validate();
  if (!(sigma2 >= 0.0)) throw InputError("noise variance must be non-negative");
  const Index n = static_cast<Index>(inputs.size());
  Matrix gram(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = KernelEval(kernel, inputs[i], inputs[j]);
  }
  gram.diagonal().array() += sigma2;
  Eigen::LLT<Matrix> llt(gram);
  bool shifted = false;
  if (llt.info() != Eigen::Success) {
    gram.diagonal().array() += 1e-10;
    llt.compute(gram);
    shifted = true;
    if (llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive semidefinite");
  }
  if (regularized) *regularized = shifted;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = normal(rng);
  return llt.matrixL() * z;
}

SyntheticDataset GenerateSynthetic(const SyntheticSpec& spec, const KernelSpec& kernel, const NoiseModel& noise) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  SyntheticDataset out;
  out.data.inputs.reserve(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) {
    Vector x(spec.d);
    for (Index k = 0; k < spec.d; ++k) x(k) = 2.0 * UniformDouble(rng) - 1.0;
    out.data.inputs.push_back(std::move(x));
  }
  // A separate stream for the targets keeps the inputs unchanged when N varies.
  out.data.targets = SampleGpTargets(out.data.inputs, kernel, noise.sigma2, rng(), &out.regularized);
  return out;
}

void ExperimentConfig::Validate() const {
  if (!dataset_path) synthetic.Validate();
  kernel.Validate();
  if (!(noise.sigma2 >= 0.0) || !std::isfinite(noise.sigma2)) {
    throw InputError(fmt::format("noise variance must be non-negative, got {}", noise.sigma2));
  }
  pipeline.Validate();
  if (output_name.empty()) throw InputError("output name must not be empty");
}

namespace {

double ParseDoubleValue(const std::string& key, const std::string& value) {
  const std::optional<double> v = ToDouble(Trim(value));
  if (!v) throw InputError(fmt::format("{}: '{}' is not a number", key, value));
  return *v;
}

std::int64_t ParseIntValue(const std::string& key, const std::string& value) {
  const std::string t = Trim(value);
  std::int64_t v = 0;
  const char* begin = t.data();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw InputError(fmt::format("{}: '{}' is not an integer", key, value));
  }
  return v;
}

bool ParseBoolValue(const std::string& key, const std::string& value) {
  std::string t = Trim(value);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw InputError(fmt::format("{}: '{}' is not a boolean", key, value));
}

Vector ParseVectorValue(const std::string& key, const std::string& value) {
  std::string t = value;
  std::replace(t.begin(), t.end(), ' ', ',');
  std::vector<double> out;
  for (const std::string& field : SplitFields(t)) {
    if (field.empty()) continue;
    out.push_back(ParseDoubleValue(key, field));
  }
  if (out.empty()) throw InputError(fmt::format("{}: empty vector", key));
  return Eigen::Map<const Vector>(out.data(), static_cast<Index>(out.size()));
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"data.path", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.dataset_path = Trim(v); }},
      {"data.n", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synthetic.n = ParseIntValue(k, v); }},
      {"data.d", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synthetic.d = ParseIntValue(k, v); }},
      {"data.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.seed = static_cast<std::uint64_t>(ParseIntValue(k, v));
       }},
      {"model.kernel", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.kernel.family = ParseKernelFamily(Trim(v));
       }},
      {"model.length_scale", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.kernel.length_scale = ParseDoubleValue(k, v);
       }},
      {"model.amplitude", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.kernel.amplitude = ParseDoubleValue(k, v);
       }},
      {"model.sigma2", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.noise.sigma2 = ParseDoubleValue(k, v);
       }},
      {"model.x_star", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.x_star = ParseVectorValue(k, v);
       }},
      {"quantum.xi", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.xi = ParseDoubleValue(k, v);
       }},
      {"quantum.zeta", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.zeta = ParseDoubleValue(k, v);
       }},
      {"quantum.epsilon", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.epsilon_target = ParseDoubleValue(k, v);
       }},
      {"quantum.gamma", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.gamma = ParseDoubleValue(k, v);
       }},
      {"quantum.steps", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.steps = ParseIntValue(k, v);
       }},
      {"quantum.path", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.pipeline.path = ParsePath(Trim(v));
       }},
      {"quantum.mode", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.pipeline.mode = ParseMode(Trim(v));
       }},
      {"quantum.shots", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.shots = ParseIntValue(k, v);
       }},
      {"quantum.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.seed = static_cast<std::uint64_t>(ParseIntValue(k, v));
       }},
      {"quantum.sign", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.sign = static_cast<int>(ParseIntValue(k, v));
       }},
      {"quantum.window", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.window_half_width = ParseDoubleValue(k, v);
       }},
      {"quantum.calibration", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.pipeline.calibration = ParseCalibration(Trim(v));
       }},
      {"quantum.retry_cap", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.retry_cap = ParseIntValue(k, v);
       }},
      {"quantum.lattice_cap", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.lattice_cap = ParseIntValue(k, v);
       }},
      {"quantum.condition_cap", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.condition_cap = ParseDoubleValue(k, v);
       }},
      {"quantum.quantization_cap", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.quantization_cap = ParseIntValue(k, v);
       }},
      {"quantum.trace_distance", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.trace_distance = ParseBoolValue(k, v);
       }},
      {"quantum.trace_tolerance", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.pipeline.trace_tolerance = ParseDoubleValue(k, v);
       }},
      {"output.dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = Trim(v); }},
      {"output.name", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_name = Trim(v); }},
      {"output.variance", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.variance = ParseBoolValue(k, v);
       }},
  };
  return setters;
}

}  // namespace

void ApplyConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto& setters = Setters();
  const auto it = setters.find(key);
  if (it == setters.end()) throw InputError(fmt::format("unknown config key '{}'", key));
  it->second(config, key, value);
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> out;
  for (const auto& [key, setter] : Setters()) out.push_back(key);
  return out;
}

namespace {

// "value   ; note" -> "value". A comment marker must follow whitespace.
std::string StripInlineComment(const std::string& value) {
  for (std::size_t i = 1; i < value.size(); ++i) {
    if ((value[i] == ';' || value[i] == '#') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
      return boost::algorithm::trim_copy(value.substr(0, i));
    }
  }
  return value;
}

}  // namespace

ExperimentConfig ParseConfig(std::istream& in, ExperimentConfig base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw InputError(fmt::format("config key '{}' must sit inside a section", section));
    for (const auto& [key, value] : body) {
      ApplyConfigValue(base, section + "." + key, StripInlineComment(value.get_value<std::string>()));
    }
  }
  return base;
}

ExperimentConfig LoadConfig(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config '{}'", path));
  return ParseConfig(in, std::move(base));
}

TrainingSet ResolveDataset(const ExperimentConfig& config, bool* regularized) {
  if (regularized) *regularized = false;
  if (config.dataset_path) return LoadDataset(*config.dataset_path);
  SyntheticDataset synthetic = GenerateSynthetic(config.synthetic, config.kernel, config.noise);
  if (regularized) *regularized = synthetic.regularized;
  return std::move(synthetic.data);
}

Vector ResolveTestPoint(const ExperimentConfig& config, Index dimension) {
  if (!config.x_star) return Vector::Zero(dimension);
  if (config.x_star->size() != dimension) {
    throw InputError(fmt::format("test point has dimension {}, data has {}", config.x_star->size(), dimension));
  }
  return *config.x_star;
}

RunReport RunExperiment(const ExperimentConfig& config, const std::string& timestamp) {
  config.Validate();
  const TrainingSet data = ResolveDataset(config);
  const Vector x_star = ResolveTestPoint(config, data.dimension());
  RunReport report = RunMeanEstimation(data, config.kernel, config.noise, x_star, config.pipeline);
  if (config.variance) {
    const RunReport v = RunVarianceEstimation(data, config.kernel, config.noise, x_star, config.pipeline);
    report.variance_estimate = v.variance_estimate;
    report.variance_abs_error = v.variance_abs_error;
  }
  report.timestamp = timestamp;
  return report;
}

std::string CurrentTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

namespace {

template <typename T>
Json Optional(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json ReportObject(const RunReport& r, bool include_timestamp) {
  Json j;
  j["version"] = r.version;
  j["seed"] = r.seed;
  if (include_timestamp) j["timestamp"] = r.timestamp;
  j["params"] = {{"xi", r.xi},
                 {"gamma", r.gamma},
                 {"zeta", Optional(r.zeta)},
                 {"M", r.steps},
                 {"N", r.n},
                 {"Npadded", r.n_padded},
                 {"path", PathName(r.path)},
                 {"mode", ModeName(r.mode)},
                 {"shots", r.shots},
                 {"epsilonTarget", r.epsilon_target},
                 {"sign", r.sign},
                 {"window", r.window},
                 {"calibration", CalibrationName(r.calibration)}};
  j["classical"] = {{"mean", r.classical_mean}, {"variance", r.classical_variance}, {"kappa", r.kappa}};
  j["quantum"] = {{"mean", Optional(r.mean_estimate)},
                  {"variance", Optional(r.variance_estimate)},
                  {"relError", Optional(r.rel_error)},
                  {"varianceAbsError", Optional(r.variance_abs_error)}};
  j["probabilities"] = {{"window", Optional(r.window_probability)},
                        {"ancilla", Optional(r.ancilla_probability)},
                        {"ancillaSuccessCount", r.ancilla_success_count},
                        {"ancillaTrials", r.ancilla_trials},
                        {"windowAccepted", r.window_accepted},
                        {"windowTrials", r.window_trials}};
  j["errors"] = {{"trotterTraceDistance", Optional(r.trotter_trace_distance)},
                 {"approxBias", Optional(r.approx_bias)},
                 {"trotterStepBound", r.trotter_step_bound},
                 {"trotterCumulativeBound", r.trotter_cumulative_bound}};
  return j;
}

template <typename T>
std::string Cell(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ReportJson(const RunReport& report, bool include_timestamp) {
  return ReportObject(report, include_timestamp).dump(2) + "\n";
}

std::string ReportCsvHeader() {
  return "version,seed,xi,gamma,zeta,M,N,Npadded,path,mode,shots,epsilonTarget,sign,window,calibration,"
         "classicalMean,classicalVariance,kappa,quantumMean,quantumVariance,relError,varianceAbsError,"
         "windowProb,ancillaProb,ancillaSuccessCount,ancillaTrials,windowAccepted,windowTrials,"
         "trotterTraceDistance,approxBias,trotterStepBound,trotterCumulativeBound,timestamp";
}

std::string ReportCsvRow(const RunReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                     r.version, r.seed, r.xi, r.gamma, Cell(r.zeta), r.steps, r.n, r.n_padded, PathName(r.path),
                     ModeName(r.mode), r.shots, r.epsilon_target, r.sign, r.window, CalibrationName(r.calibration),
                     r.classical_mean, r.classical_variance, r.kappa, Cell(r.mean_estimate),
                     Cell(r.variance_estimate), Cell(r.rel_error), Cell(r.variance_abs_error),
                     Cell(r.window_probability), Cell(r.ancilla_probability), r.ancilla_success_count,
                     r.ancilla_trials, r.window_accepted, r.window_trials, Cell(r.trotter_trace_distance),
                     Cell(r.approx_bias), r.trotter_step_bound, r.trotter_cumulative_bound, CsvQuote(r.timestamp));
}

namespace {

std::filesystem::path OutputDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  if (ec) throw InputError(fmt::format("cannot create output directory '{}': {}", base.string(), ec.message()));
  return base;
}

}  // namespace

void WriteReport(const RunReport& report, const std::string& dir, const std::string& name) {
  const std::filesystem::path base = OutputDirectory(dir);
  std::ofstream json(base / (name + ".json"));
  std::ofstream csv(base / (name + ".csv"));
  if (!json || !csv) throw InputError(fmt::format("cannot write reports into '{}'", base.string()));
  json << ReportJson(report);
  csv << ReportCsvHeader() << "\n" << ReportCsvRow(report) << "\n";
}

std::string ClassicalJson(const ExperimentConfig& config) {
  config.Validate();
  const TrainingSet data = ResolveDataset(config);
  const Vector x_star = ResolveTestPoint(config, data.dimension());
  const CovarianceSystem system = BuildCovarianceSystem(data, config.kernel, config.noise, x_star);
  const PosteriorResult posterior = ClassicalPosterior(system, data.targets, config.pipeline.condition_cap);
  Json j;
  j["version"] = kReportVersion;
  j["N"] = data.size();
  j["d"] = data.dimension();
  j["kernel"] = {{"family", KernelFamilyName(config.kernel.family)},
                 {"lengthScale", config.kernel.length_scale},
                 {"amplitude", config.kernel.amplitude}};
  j["sigma2"] = config.noise.sigma2;
  j["xStar"] = std::vector<double>(x_star.data(), x_star.data() + x_star.size());
  j["classical"] = {{"mean", posterior.mean},
                    {"variance", posterior.variance},
                    {"kappa", posterior.condition_number},
                    {"kStarStar", system.k_star_star}};
  return j.dump(2) + "\n";
}

std::string ErrorJson(const std::string& kind, const std::string& message, int exit_code) {
  Json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"exitCode", exit_code}};
  return j.dump() + "\n";
}

std::string AxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSteps:
      return "M";
    case SweepAxis::kXi:
      return "xi";
    case SweepAxis::kGamma:
      return "gamma";
    case SweepAxis::kEpsilon:
      return "epsilon";
    case SweepAxis::kShots:
      return "shots";
  }
  return "M";
}

SweepAxis ParseAxis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::kSteps, SweepAxis::kXi, SweepAxis::kGamma, SweepAxis::kEpsilon, SweepAxis::kShots}) {
    if (AxisName(a) == name) return a;
  }
  throw InputError(fmt::format("unknown sweep axis '{}' (expected M, xi, gamma, epsilon or shots)", name));
}

void SweepSpec::Validate() const {
  if (values.empty()) throw InputError("sweep needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(fmt::format("sweep value {} must be positive", v));
    if ((axis == SweepAxis::kSteps || axis == SweepAxis::kShots) && v != std::floor(v)) {
      throw InputError(fmt::format("sweep value {} must be an integer on axis {}", v, AxisName(axis)));
    }
    if (i > 0 && !(v > values[i - 1])) throw InputError("sweep values must be strictly increasing");
  }
  if (repetitions < 1) throw InputError("sweep repetitions must be at least 1");
  base.Validate();
}

ExperimentConfig ConfigForPoint(const SweepSpec& spec, double value) {
  ExperimentConfig c = spec.base;
  switch (spec.axis) {
    case SweepAxis::kSteps:
      c.pipeline.steps = static_cast<std::int64_t>(value);
      break;
    case SweepAxis::kXi:
      c.pipeline.xi = value;
      break;
    case SweepAxis::kGamma:
      c.pipeline.gamma = value;
      break;
    case SweepAxis::kEpsilon:
      c.pipeline.epsilon_target = value;
      break;
    case SweepAxis::kShots:
      c.pipeline.shots = static_cast<std::int64_t>(value);
      c.pipeline.mode = MeasurementMode::kSampled;
      break;
  }
  return c;
}

SweepResult RunSweep(const SweepSpec& spec, const std::string& timestamp) {
  spec.Validate();
  SweepResult result;
  result.axis = spec.axis;
  result.slope_metric = spec.axis == SweepAxis::kSteps   ? "traceDistance"
                        : spec.axis == SweepAxis::kShots ? "stdError"
                                                         : "relError";
  for (double value : spec.values) {
    SweepPoint point;
    point.axis_value = value;
    ExperimentConfig config = ConfigForPoint(spec, value);
    std::vector<double> means;
    try {
      for (std::int64_t r = 0; r < spec.repetitions; ++r) {
        config.pipeline.seed = spec.base.pipeline.seed + static_cast<std::uint64_t>(r);
        RunReport report = RunExperiment(config, timestamp);
        means.push_back(report.mean_estimate.value_or(std::nan("")));
        if (r == 0) point.report = std::move(report);
      }
    } catch (const Error& e) {
      point.error = fmt::format("{}: {}", e.kind(), e.what());
    } catch (const std::exception& e) {
      point.error = fmt::format("internal: {}", e.what());
    }
    if (point.report) {
      const RunReport& r = *point.report;
      point.rel_error = r.rel_error;
      point.trace_distance = r.trotter_trace_distance;
      point.window_probability = r.window_probability;
      point.ancilla_acceptance =
          r.ancilla_trials > 0
              ? std::optional<double>(static_cast<double>(r.ancilla_success_count) / static_cast<double>(r.ancilla_trials))
              : r.ancilla_probability;
    }
    if (!point.error && means.size() >= 2) {
      const Eigen::Map<const Vector> m(means.data(), static_cast<Index>(means.size()));
      const double centered = (m.array() - m.mean()).square().sum();
      point.std_error = std::sqrt(centered / static_cast<double>(means.size() - 1));
    }
    result.points.push_back(std::move(point));
  }
  std::vector<double> xs, ys;
  for (const SweepPoint& p : result.points) {
    const std::optional<double>& metric = spec.axis == SweepAxis::kSteps   ? p.trace_distance
                                          : spec.axis == SweepAxis::kShots ? p.std_error
                                                                           : p.rel_error;
    if (!metric) continue;
    xs.push_back(p.axis_value);
    ys.push_back(*metric);
  }
  result.slope = FitLogLogSlope(xs, ys);
  return result;
}

std::string SweepCsv(const SweepResult& result) {
  std::string out = "axis_value,relError,traceDistance,windowProb,ancillaAcceptance,stdError,error\n";
  for (const SweepPoint& p : result.points) {
    out += fmt::format("{},{},{},{},{},{},{}\n", p.axis_value, Cell(p.rel_error), Cell(p.trace_distance),
                       Cell(p.window_probability), Cell(p.ancilla_acceptance), Cell(p.std_error),
                       CsvQuote(p.error.value_or("")));
  }
  return out;
}

std::string SweepJson(const SweepResult& result, bool include_timestamp) {
  Json j;
  j["version"] = kReportVersion;
  j["axis"] = AxisName(result.axis);
  j["slopeMetric"] = result.slope_metric;
  j["slope"] = Optional(result.slope);
  Json points = Json::array();
  for (const SweepPoint& p : result.points) {
    Json pj;
    pj["axisValue"] = p.axis_value;
    pj["error"] = Optional(p.error);
    pj["stdError"] = Optional(p.std_error);
    pj["report"] = p.report ? ReportObject(*p.report, include_timestamp) : Json(nullptr);
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

void WriteSweep(const SweepResult& result, const std::string& dir, const std::string& name) {
  const std::filesystem::path base = OutputDirectory(dir);
  std::ofstream csv(base / (name + "_sweep.csv"));
  std::ofstream json(base / (name + "_sweep.json"));
  if (!csv || !json) throw InputError(fmt::format("cannot write sweep reports into '{}'", base.string()));
  csv << SweepCsv(result);
  json << SweepJson(result);
}

std::optional<double> FitLogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("slope fit needs matching x and y");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const Eigen::Map<const Vector> a(lx.data(), static_cast<Index>(lx.size()));
  const Eigen::Map<const Vector> b(ly.data(), static_cast<Index>(ly.size()));
  const Vector ca = a.array() - a.mean();
  const double denom = ca.squaredNorm();
  if (!(denom > 0.0)) return std::nullopt;
  return ca.dot(b - Vector::Constant(b.size(), b.mean())) / denom;
}

}  // namespace cvgpr
