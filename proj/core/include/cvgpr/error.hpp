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

#ifndef CVGPR_ERROR_HPP_
#define CVGPR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace cvgpr {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kConditioningError = 3,
  kNumericalError = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
  virtual const char* kind() const noexcept = 0;
};

// Invalid user input: bad dimensions, out-of-range parameters, malformed files.
class InputError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInputError; }
  const char* kind() const noexcept override { return "input"; }
};

// Malformed CSV or config text. The message names the offending line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t line_;
};

class SchemaError : public InputError {
 public:
  using InputError::InputError;
  const char* kind() const noexcept override { return "schema"; }
};

// A one-sparse term list whose members are not reflections.
class InvalidDecompositionError : public InputError {
 public:
  using InputError::InputError;
  const char* kind() const noexcept override { return "invalid-decomposition"; }
};

// Singular or near-singular covariance, or a spectrum that cannot be inverted.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& message, double condition_number)
      : Error(message), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }
  ExitCode exit_code() const noexcept override { return ExitCode::kConditioningError; }
  const char* kind() const noexcept override { return "conditioning"; }

 private:
  double condition_number_;
};

// Internal numerical failures: quantization overflow, unresolved grids,
// degenerate readouts.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNumericalError; }
  const char* kind() const noexcept override { return "numerical"; }
};

class QuantizationOverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "quantization-overflow"; }
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "resolution"; }
};

class DegenerateRunError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "degenerate-run"; }
};

}  // namespace cvgpr

#endif  // CVGPR_ERROR_HPP_
