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

#include "molso/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "molso/error.hpp"

namespace molso {

std::vector<double> compute_weights(std::span<const std::size_t> ranks, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ParameterError("weight parameter k must be positive and finite, got " +
                         std::to_string(k));
  }
  if (ranks.empty()) throw EmptyInputError("compute_weights: no ranks");
  const double offset = k * static_cast<double>(ranks.size());
  std::vector<double> w(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    w[i] = 1.0 / (offset + static_cast<double>(ranks[i]));
  }
  return w;
}

std::vector<double> sampling_distribution(std::span<const double> weights) {
  if (weights.empty()) throw EmptyInputError("sampling_distribution: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ParameterError("weights sum to zero");
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) p[i] = weights[i] / total;
  return p;
}

WeightedSampler::WeightedSampler(std::span<const double> probabilities)
    : cumulative_(probabilities.size()) {
  if (probabilities.empty()) throw EmptyInputError("sampler over an empty distribution");
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (!(probabilities[i] >= 0.0)) throw ParameterError("negative probability");
    acc += probabilities[i];
    cumulative_[i] = acc;
    if (probabilities[i] > 0.0) last_positive_ = i;
  }
  if (!(acc > 0.0)) throw ParameterError("probabilities sum to zero");
  for (auto& c : cumulative_) c /= acc;
}

std::size_t WeightedSampler::operator()(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_positive_;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::vector<std::size_t> draw_minibatch_indices(std::span<const double> probabilities,
                                                std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ParameterError("batch size must be at least 1");
  WeightedSampler sampler(probabilities);
  std::vector<std::size_t> out(batch_size);
  for (auto& i : out) i = sampler(rng);
  return out;
}

WeightedDataset WeightedDataset::build(std::vector<Point> points,
                                       std::vector<ObjectiveVector> objectives,
                                       std::vector<Origin> origin, double k) {
  if (points.empty()) throw EmptyInputError("weighted dataset is empty");
  if (objectives.size() != points.size() || origin.size() != points.size()) {
    throw DimensionError("weighted dataset columns are misaligned");
  }
  auto partition = pareto_partition(objectives);
  WeightedDataset ds;
  ds.weights = compute_weights(partition.ranks, k);
  ds.ranks = std::move(partition.ranks);
  ds.points = std::move(points);
  ds.objectives = std::move(objectives);
  ds.origin = std::move(origin);
  return ds;
}

WeightedDataset WeightedDataset::uniform(std::vector<Point> points) {
  if (points.empty()) throw EmptyInputError("weighted dataset is empty");
  WeightedDataset ds;
  const std::size_t n = points.size();
  ds.points = std::move(points);
  ds.ranks.assign(n, 0);
  ds.weights.assign(n, 1.0);
  ds.origin.assign(n, Origin::original);
  return ds;
}

}  // namespace molso
