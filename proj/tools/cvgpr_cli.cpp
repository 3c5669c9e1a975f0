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

// cvgpr command-line front end.
//
//   cvgpr classical  classical posterior for a dataset or synthetic spec
//   cvgpr run        mean and variance estimation, JSON + CSV report
//   cvgpr sweep      one run per axis value, plot-data CSV and log-log slope
//   cvgpr gen        synthetic training set as CSV

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cvgpr/error.hpp"
#include "cvgpr/experiment.hpp"

namespace {

// Flag name -> config key.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"data", "data.path"},
    {"n", "data.n"},
    {"d", "data.d"},
    {"data-seed", "data.seed"},
    {"kernel", "model.kernel"},
    {"length-scale", "model.length_scale"},
    {"amplitude", "model.amplitude"},
    {"sigma2", "model.sigma2"},
    {"x-star", "model.x_star"},
    {"xi", "quantum.xi"},
    {"zeta", "quantum.zeta"},
    {"epsilon", "quantum.epsilon"},
    {"gamma", "quantum.gamma"},
    {"steps", "quantum.steps"},
    {"path", "quantum.path"},
    {"mode", "quantum.mode"},
    {"shots", "quantum.shots"},
    {"seed", "quantum.seed"},
    {"sign", "quantum.sign"},
    {"window", "quantum.window"},
    {"calibration", "quantum.calibration"},
    {"retry-cap", "quantum.retry_cap"},
    {"lattice-cap", "quantum.lattice_cap"},
    {"condition-cap", "quantum.condition_cap"},
    {"quantization-cap", "quantum.quantization_cap"},
    {"trace-distance", "quantum.trace_distance"},
    {"trace-tolerance", "quantum.trace_tolerance"},
    {"output-dir", "output.dir"},
    {"name", "output.name"},
    {"variance", "output.variance"},
};

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void Attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "INI config file; flags override its values");
    for (const auto& [flag, key] : kFlags) {
      app->add_option("--" + flag, values[flag], fmt::format("sets {}", key));
    }
  }

  cvgpr::ExperimentConfig Build(const CLI::App* app) const {
    cvgpr::ExperimentConfig config;
    if (!config_path.empty()) config = cvgpr::LoadConfig(config_path);
    for (const auto& [flag, key] : kFlags) {
      if (app->count("--" + flag) > 0) cvgpr::ApplyConfigValue(config, key, values.at(flag));
    }
    if (config.output_dir.empty()) {
      const char* env = std::getenv("CVGPR_OUTPUT_DIR");
      config.output_dir = env != nullptr ? env : ".";
    }
    return config;
  }
};

std::vector<double> ParseValues(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string field = text.substr(start, end - start);
    if (!field.empty()) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size() || used == 0) throw cvgpr::InputError(fmt::format("'{}' is not a number", field));
      out.push_back(v);
    }
    start = end + 1;
  }
  return out;
}

int Fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << cvgpr::ErrorJson(kind, message, code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process regression on a simulated hybrid continuous-variable processor"};
  app.require_subcommand(1);

  ConfigFlags classical_flags, run_flags, sweep_flags, gen_flags;
  CLI::App* classical = app.add_subcommand("classical", "Classical posterior mean and variance");
  classical_flags.Attach(classical);

  CLI::App* run = app.add_subcommand("run", "Quantum mean and variance estimation");
  run_flags.Attach(run);
  bool quiet = false;
  run->add_flag("-q,--quiet", quiet, "Do not echo the JSON report");

  CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweep along one axis");
  sweep_flags.Attach(sweep);
  std::string axis = "M";
  std::string values_text;
  std::int64_t repetitions = 1;
  sweep->add_option("--axis", axis, "M, xi, gamma, epsilon or shots")->capture_default_str();
  sweep->add_option("--values", values_text, "Comma-separated, strictly increasing")->required();
  sweep->add_option("--repetitions", repetitions, "Runs per point with consecutive seeds")->capture_default_str();

  CLI::App* gen = app.add_subcommand("gen", "Synthetic training set");
  gen_flags.Attach(gen);
  std::string gen_output;
  gen->add_option("-o,--output", gen_output, "CSV destination (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("input", e.what(), static_cast<int>(cvgpr::ExitCode::kInputError));
  }

  try {
    if (classical->parsed()) {
      std::cout << cvgpr::ClassicalJson(classical_flags.Build(classical));
    } else if (run->parsed()) {
      const cvgpr::ExperimentConfig config = run_flags.Build(run);
      const cvgpr::RunReport report = cvgpr::RunExperiment(config, cvgpr::CurrentTimestamp());
      cvgpr::WriteReport(report, config.output_dir, config.output_name);
      if (!quiet) std::cout << cvgpr::ReportJson(report);
    } else if (sweep->parsed()) {
      cvgpr::SweepSpec spec;
      spec.base = sweep_flags.Build(sweep);
      spec.axis = cvgpr::ParseAxis(axis);
      spec.values = ParseValues(values_text);
      spec.repetitions = repetitions;
      const cvgpr::SweepResult result = cvgpr::RunSweep(spec, cvgpr::CurrentTimestamp());
      cvgpr::WriteSweep(result, spec.base.output_dir, spec.base.output_name);
      std::cout << cvgpr::SweepCsv(result);
      if (result.slope) std::cout << fmt::format("# slope({}) = {}\n", result.slope_metric, *result.slope);
    } else if (gen->parsed()) {
      const cvgpr::ExperimentConfig config = gen_flags.Build(gen);
      const cvgpr::SyntheticDataset synthetic = cvgpr::GenerateSynthetic(config.synthetic, config.kernel, config.noise);
      if (synthetic.regularized) std::cerr << "warning: Gram matrix regularized with 1e-10 I\n";
      if (gen_output.empty()) {
        cvgpr::WriteDatasetCsv(std::cout, synthetic.data);
      } else {
        std::ofstream out(gen_output);
        if (!out) throw cvgpr::InputError(fmt::format("cannot write '{}'", gen_output));
        cvgpr::WriteDatasetCsv(out, synthetic.data);
      }
    }
  } catch (const cvgpr::Error& e) {
    return Fail(e.kind(), e.what(), static_cast<int>(e.exit_code()));
  } catch (const std::exception& e) {
    return Fail("internal", e.what(), static_cast<int>(cvgpr::ExitCode::kNumericalError));
  }
  return 0;
}
