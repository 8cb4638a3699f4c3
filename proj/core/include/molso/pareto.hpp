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

#include "molso/types.hpp"

namespace molso {

/// True iff `a` is at least as good as `b` in every objective and strictly
/// better in at least one. Both vectors must be oriented (larger is better).
/// Throws DimensionError on a length mismatch.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Indices (ascending) of the points not dominated by any other point.
/// O(n^2 K). Throws EmptyInputError for an empty list.
std::vector<std::size_t> find_nondominated(std::span<const ObjectiveVector> points);

/// Same as above restricted to the points listed in `subset`; the returned
/// indices refer to `points` and are ascending.
std::vector<std::size_t> find_nondominated(std::span<const ObjectiveVector> points,
                                           std::span<const std::size_t> subset);

/// Successive Pareto fronts of a dataset together with the cumulative rank of
/// every point: a point in front j has rank |P_1| + ... + |P_{j-1}|, so the
/// first front is rank 0 (not 1).
struct FrontPartition {
  std::vector<std::vector<std::size_t>> fronts;  ///< each ascending
  std::vector<std::size_t> ranks;                ///< per point
  std::vector<std::size_t> front_of;             ///< per point, 0-based front index

  std::size_t size() const noexcept { return ranks.size(); }
};

/// Non-dominated sorting by repeated peeling. Two-objective inputs take an
/// O(n log n) sweep that yields the same partition.
FrontPartition pareto_partition(std::span<const ObjectiveVector> points);

/// Reference O(S n^2 K) peeling, independent of the two-objective sweep.
FrontPartition pareto_partition_peeling(std::span<const ObjectiveVector> points);

/// Cumulative rank of point `i`. Throws IndexError when out of range.
std::size_t rank_lookup(const FrontPartition& partition, std::size_t i);

/// NSGA-II crowding distance of each member of `front` (aligned with it).
/// Boundary members of every objective get +infinity.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> points,
                                      std::span<const std::size_t> front);

/// Picks `count` indices of the best points: whole fronts in order, then the
/// members of the cut front with the largest crowding distance (ties by
/// index). Result is in selection order.
std::vector<std::size_t> select_by_crowding(std::span<const ObjectiveVector> points,
                                            const FrontPartition& partition, std::size_t count);

}  // namespace molso
