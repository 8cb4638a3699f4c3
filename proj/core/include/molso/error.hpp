// Copyright 2026 The molso Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace molso {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector lengths or model dimensions disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range (k <= 0, frac >= 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Run configuration failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An objective evaluation failed. Carries the index of the offending point
/// within its batch when one can be identified.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what,
                           std::optional<std::size_t> point_index = std::nullopt)
      : Error(point_index ? what + " (point " + std::to_string(*point_index) + ")" : what),
        point_index_(point_index) {}
  std::optional<std::size_t> point_index() const noexcept { return point_index_; }

 private:
  std::optional<std::size_t> point_index_;
};

/// The external evaluator violated the line protocol (bad JSON, unknown,
/// duplicate or missing ids).
class ProtocolError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// Training diverged or a matrix could not be factorized.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace molso
