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
#include <span>
#include <vector>

#include "molso/pareto.hpp"
#include "molso/types.hpp"

namespace molso {

/// w_i = 1 / (k N + rank_i) with N = ranks.size(). Not normalized.
/// Throws ParameterError unless k > 0, EmptyInputError for no ranks.
std::vector<double> compute_weights(std::span<const std::size_t> ranks, double k);

/// p_i = w_i / sum(w). Zero entries are allowed as long as the total is
/// positive; negative or non-finite entries throw ParameterError.
std::vector<double> sampling_distribution(std::span<const double> weights);

/// Inverse-CDF sampler over a fixed probability vector.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::span<const double> probabilities);
  std::size_t operator()(Rng& rng) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

/// `batch_size` i.i.d. draws from `probabilities`.
std::vector<std::size_t> draw_minibatch_indices(std::span<const double> probabilities,
                                                std::size_t batch_size, Rng& rng);

enum class Origin { original, candidate };

/// Training set with its ranking and rank-derived weights.
struct WeightedDataset {
  std::vector<Point> points;
  std::vector<ObjectiveVector> objectives;  ///< oriented
  std::vector<std::size_t> ranks;
  std::vector<double> weights;
  std::vector<Origin> origin;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t dim() const noexcept { return points.empty() ? 0 : points.front().size(); }

  /// Ranks `objectives` by Pareto fronts and attaches weights for `k`.
  static WeightedDataset build(std::vector<Point> points, std::vector<ObjectiveVector> objectives,
                               std::vector<Origin> origin, double k);

  /// Every point gets weight 1 and rank 0; used for baseline training.
  static WeightedDataset uniform(std::vector<Point> points);
};

}  // namespace molso
