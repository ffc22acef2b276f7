// Copyright 2026 The sffsim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace sffsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator or Hilbert-space dimension exceeds a configured limit or mismatches.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's precondition (wrong grid kind, bad subsystem, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input lies outside the mathematical domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed. Carries the residual it reached.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NonUnitaryError : public Error {
 public:
  using Error::Error;
};

/// Integrated density matrix lost positivity; retry with a smaller step.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// A mitigation denominator fell below its guard threshold.
class DivisionGuardError : public Error {
 public:
  DivisionGuardError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class NoPlateauError : public Error {
 public:
  using Error::Error;
};

/// Configuration file or override failed schema validation.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sffsim
