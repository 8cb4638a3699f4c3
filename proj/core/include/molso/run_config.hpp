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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "molso/dataset_io.hpp"
#include "molso/objectives.hpp"
#include "molso/orchestrator.hpp"

namespace molso {

/// Synthetic initial data: `n` uniform points in [low, high]^dim.
struct GeneratedData {
  std::size_t n = 0;
  std::size_t dim = 0;
  double low = 0.0;
  double high = 1.0;
  std::uint64_t seed = 0;
};

/// Parsed run configuration file.
///
///   {
///     "seed": 7,
///     "output_dir": "runs/demo",
///     "dataset": {"path": "d0.csv"} | {"generate": {"n", "dim", "low", "high", "seed"}},
///     "objectives": {"suite": "linear-ripple"}
///                 | [{"name", "sense", "builtin" | "command" + "column", "coefficient"}],
///     "loop": {...}, "model": {...}, "training": {...},
///     "evaluator": {"timeout_seconds", "processes"},
///     "metrics": {"diversity"},
///     "ablate_top": 0.2
///   }
///
/// Unknown keys anywhere are rejected. Relative paths are resolved against
/// the directory holding the configuration file.
struct RunConfig {
  EngineConfig engine;
  std::vector<ObjectiveSpec> objectives;
  std::optional<std::filesystem::path> dataset_path;
  std::optional<GeneratedData> generated;
  std::filesystem::path output_dir = "molso-run";
  /// Remove this top fraction of D0 before the baseline is trained.
  std::optional<double> ablate_top;
};

/// Throws ConfigError describing the first schema violation.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

/// D0 as configured: read or generated, then ablated if requested.
Dataset load_initial_data(const RunConfig& config);

}  // namespace molso
