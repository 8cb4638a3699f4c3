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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molso/genmodel.hpp"
#include "molso/metrics.hpp"
#include "molso/objectives.hpp"
#include "molso/pareto.hpp"
#include "molso/surrogate.hpp"
#include "molso/types.hpp"

namespace molso {

enum class Strategy { random, bo };
enum class TieBreak { crowding, random };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);
std::string to_string(TieBreak tie_break);
TieBreak tie_break_from_string(const std::string& name);

/// Knobs of the weighted-retraining loop. By default each of ten cycles draws
/// 250 random points and keeps the best 50, retrains for one epoch and
/// mixes the new points with a 10% subset of the initial data.
struct LoopConfig {
  double k = 1e-3;
  std::size_t iterations = 10;
  std::size_t n_random = 250;
  std::size_t top_r = 50;
  double subset_frac = 0.10;
  std::size_t retrain_epochs = 1;
  std::size_t baseline_epochs = 30;
  Strategy strategy = Strategy::random;
  std::size_t bo_batch = 50;
  std::size_t stats_sample = 1000;
  std::uint64_t seed = 0;

  TieBreak tie_break = TieBreak::crowding;
  std::size_t gp_max_points = 1000;
  double dedup_tolerance = 1e-9;
  DiversityMetric diversity_metric = DiversityMetric::euclidean;

  /// Throws ParameterError on inconsistent values (top_r > n_random, ...).
  void validate() const;
};

/// Everything the loop needs apart from data and objectives.
struct EngineConfig {
  LoopConfig loop;
  ModelConfig model;
  /// Optimizer settings; `epochs` is overridden by baseline_epochs or
  /// retrain_epochs depending on the phase.
  TrainingConfig training;
  EvaluatorOptions evaluator;
  ProposalOptions proposal;
};

/// A generated point that was kept, with its raw scores and the cycle that
/// produced it.
struct Candidate {
  Point x;
  ObjectiveVector raw;
  std::size_t iteration = 0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  IterationMetrics metrics;
  std::size_t d_new_size = 0;
  std::size_t d_train_size = 0;
  double weighted_loss = 0.0;
  double wall_time_s = 0.0;
};

/// Complete loop state; copying it deep-copies the model.
///
/// The training set of the next cycle is d0[d0_subset] followed by d_new.
/// Random streams are derived from (seed, iteration, purpose), so the seed
/// and the iteration counter are the whole random state.
struct LoopState {
  std::vector<Point> d0;
  std::vector<ObjectiveVector> d0_raw;
  std::vector<std::size_t> d0_subset;
  std::vector<Candidate> d_new;
  std::unique_ptr<GenerativeModel> model;
  std::size_t iteration = 0;
  std::vector<IterationRecord> log;
  std::uint64_t seed = 0;
  StandardizationStats stats;
  std::vector<double> thresholds;  ///< D0 medians, for the Jaccard metric

  LoopState() = default;
  LoopState(const LoopState& other);
  LoopState& operator=(const LoopState& other);
  LoopState(LoopState&&) noexcept = default;
  LoopState& operator=(LoopState&&) noexcept = default;

  std::size_t d_train_size() const noexcept { return d0_subset.size() + d_new.size(); }
  std::vector<Point> d_train_points() const;
  std::vector<ObjectiveVector> d_train_raw() const;
};

/// Purposes of the derived random streams.
enum class Stream : std::uint32_t {
  model_init = 1,
  baseline = 2,
  fit = 3,
  candidates = 4,
  subset = 5,
  snapshot = 6,
};

Rng derive_rng(std::uint64_t seed, std::uint64_t iteration, Stream purpose);

/// Fits a fresh model on `d0` with uniform weights for `training.epochs`
/// passes. Throws EmptyInputError for an empty dataset.
std::unique_ptr<GenerativeModel> train_baseline(const std::vector<Point>& d0,
                                                const ModelConfig& model,
                                                const TrainingConfig& training, Rng& rng,
                                                FitReport* report = nullptr);

/// Decodes `n` prior draws, scores them and summarizes the snapshot.
IterationMetrics take_snapshot(const GenerativeModel& model, std::span<const ObjectiveSpec> specs,
                               std::size_t n, Rng& rng, const LoopConfig& loop,
                               std::span<const double> thresholds,
                               const EvaluatorOptions& evaluator);

/// Scores D0 when `d0_raw` is empty, freezes the standardization stats,
/// trains the baseline and records the iteration-0 snapshot.
LoopState bootstrap(std::vector<Point> d0, std::vector<ObjectiveVector> d0_raw,
                    const EngineConfig& config, std::span<const ObjectiveSpec> specs);

/// One retraining cycle: rank, weight, retrain, generate, select, augment,
/// redraw the D0 subset, snapshot. The input state is never modified; on any
/// error nothing of the cycle is kept.
LoopState run_iteration(const LoopState& state, const EngineConfig& config,
                        std::span<const ObjectiveSpec> specs);

/// Points selected from a scored random batch: whole fronts in rank order,
/// the cut front resolved by crowding distance or at random.
std::vector<std::size_t> select_candidates(std::span<const ObjectiveVector> oriented,
                                           std::size_t top_r, TieBreak tie_break, Rng& rng);

struct AblationResult {
  std::vector<std::size_t> kept;     ///< ascending
  std::vector<std::size_t> removed;  ///< in removal order
  /// Members of the last front (of the full dataset) touched by the removal.
  std::vector<std::size_t> worst_removed_front;
};

/// Removes the best ceil(frac n) points: whole fronts first, then the
/// largest-crowding-distance members of the boundary front. Throws
/// ParameterError unless 0 < frac < 1.
AblationResult ablate_top(std::span<const ObjectiveVector> oriented, double frac);

struct RunOptions {
  std::filesystem::path output_dir;
  bool resume = false;
  std::function<void(const IterationRecord&)> on_iteration;
};

/// Bootstraps (or resumes from the latest checkpoint in `output_dir`) and runs
/// cycles until `config.loop.iterations`. After every cycle writes
/// checkpoints/state-NNNN.json, checkpoints/model-NNNN.json, log.jsonl and
/// the LATEST pointer, each atomically. Ends with candidates.csv.
LoopState run(const EngineConfig& config, std::vector<Point> d0,
              std::vector<ObjectiveVector> d0_raw, std::span<const ObjectiveSpec> specs,
              const RunOptions& options);

/// Final candidates ordered by front within D_new, then by decreasing
/// crowding distance. Each entry is (index into d_new, front, crowding).
struct RankedCandidate {
  std::size_t index;
  std::size_t front;
  double crowding;
};
std::vector<RankedCandidate> rank_candidates(const LoopState& state,
                                             std::span<const ObjectiveSpec> specs);

}  // namespace molso
