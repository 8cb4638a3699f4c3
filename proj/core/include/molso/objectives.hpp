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

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "molso/types.hpp"

namespace molso {

enum class Sense { maximize, minimize };

std::string to_string(Sense sense);
Sense sense_from_string(const std::string& name);  ///< "max"/"maximize"/"min"/"minimize"

/// A function compiled into the library, looked up by name.
struct BuiltinSource {
  std::string function;
};

/// An objective computed by an external evaluator process. All specs that
/// share a command are served by one request per point; `column` selects the
/// entry of the returned score vector.
struct ExternalSource {
  std::string command;
  std::size_t column = 0;
};

struct ObjectiveSpec {
  std::string name;
  Sense sense = Sense::maximize;
  std::variant<BuiltinSource, ExternalSource> source;
  /// Coefficient in the scalarized score; defaults to +1 (maximize) or -1
  /// (minimize).
  std::optional<double> coefficient;
};

/// Names of the built-in objective functions.
std::vector<std::string> builtin_functions();

/// Evaluates one built-in function. Throws ParameterError for unknown names.
///
///   sphere   -||x||^2
///   zdt1-f1  x_0                              (x clamped to [0, 1])
///   zdt1-f2  g (1 - sqrt(x_0 / g)), g = 1 + 9 sum_{i>0} x_i / (d - 1)
///   linear   sum_i x_i
///   ripple   sum_i sin^2(pi x_i)
double evaluate_builtin(const std::string& function, std::span<const double> x);

/// Objective lists for the named suites: "sphere-max", "zdt1-pair", "linear-ripple".
std::vector<ObjectiveSpec> builtin_suite(const std::string& suite);
std::vector<std::string> builtin_suites();

/// Uniform design points in [low, high]^dim.
std::vector<Point> sample_uniform_design(std::size_t n, std::size_t dim, double low, double high,
                                         Rng& rng);

struct EvaluatorOptions {
  std::chrono::milliseconds timeout{60'000};  ///< per batch and process
  std::size_t processes = 1;                  ///< evaluator processes per command
};

/// Timeout from MOLSO_EVALUATOR_TIMEOUT (seconds) when set, else `fallback`.
std::chrono::milliseconds evaluator_timeout_from_env(std::chrono::milliseconds fallback);

/// Raw objective vectors (each objective in its own sense), one per point in
/// objective order. Throws EvaluationError carrying the point index on failure.
std::vector<ObjectiveVector> evaluate_batch(std::span<const ObjectiveSpec> specs,
                                            std::span<const Point> points,
                                            const EvaluatorOptions& options = {});

/// Negates minimize-sense entries so every entry is larger-is-better. The map
/// is its own inverse.
ObjectiveVector orient(std::span<const double> raw, std::span<const ObjectiveSpec> specs);
std::vector<ObjectiveVector> orient_all(std::span<const ObjectiveVector> raw,
                                        std::span<const ObjectiveSpec> specs);

/// Per-objective mean and (population) standard deviation of raw scores,
/// measured once on the initial dataset and then frozen.
struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  /// Throws ParameterError when an objective has zero spread.
  static StandardizationStats from_scores(std::span<const ObjectiveVector> raw);
};

/// s = sum_k c_k (raw_k - mean_k) / std_k with c_k the objective coefficient; to
/// be maximized. Generalizes the two-objective "maximize one, penalize the
/// other" construction to any K.
double scalarize(std::span<const double> raw, std::span<const ObjectiveSpec> specs,
                 const StandardizationStats& stats);

}  // namespace molso
