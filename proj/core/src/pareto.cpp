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

#include "molso/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "molso/error.hpp"

namespace molso {
namespace {

void check_uniform(std::span<const ObjectiveVector> points) {
  if (points.empty()) throw EmptyInputError("objective list is empty");
  const std::size_t k = points.front().size();
  if (k == 0) throw DimensionError("objective vectors have zero length");
  for (const auto& p : points) {
    if (p.size() != k) {
      throw DimensionError("objective vectors differ in length (" + std::to_string(k) + " vs " +
                           std::to_string(p.size()) + ")");
    }
  }
}

void fill_ranks(FrontPartition& out, std::size_t n) {
  out.ranks.assign(n, 0);
  out.front_of.assign(n, 0);
  std::size_t cumulative = 0;
  for (std::size_t f = 0; f < out.fronts.size(); ++f) {
    for (std::size_t i : out.fronts[f]) {
      out.ranks[i] = cumulative;
      out.front_of[i] = f;
    }
    cumulative += out.fronts[f].size();
  }
}

// Sweep for K = 2. Points are visited by (f0 desc, f1 desc) so every
// dominator of a point is visited before it. The last member of a front
// carries that front's largest f1, and a front dominates the visited point
// iff that member does.
FrontPartition sweep_2d(std::span<const ObjectiveVector> points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][0] != points[b][0]) return points[a][0] > points[b][0];
    if (points[a][1] != points[b][1]) return points[a][1] > points[b][1];
    return a < b;
  });

  FrontPartition out;
  std::vector<std::size_t> last;  // last member of each front
  for (std::size_t i : order) {
    const auto& p = points[i];
    auto dominated_by_front = [&](std::size_t q) {
      const auto& l = points[q];
      return l[1] > p[1] || (l[1] == p[1] && l[0] > p[0]);
    };
    auto it = std::partition_point(last.begin(), last.end(), dominated_by_front);
    const auto f = static_cast<std::size_t>(it - last.begin());
    if (f == last.size()) {
      last.push_back(i);
      out.fronts.emplace_back();
    } else {
      last[f] = i;
    }
    out.fronts[f].push_back(i);
  }
  for (auto& front : out.fronts) std::sort(front.begin(), front.end());
  fill_ranks(out, n);
  return out;
}

}  // namespace

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dominates: length mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
    if (a[k] > b[k]) strictly = true;
  }
  return strictly;
}

std::vector<std::size_t> find_nondominated(std::span<const ObjectiveVector> points,
                                           std::span<const std::size_t> subset) {
  check_uniform(points);
  if (subset.empty()) throw EmptyInputError("subset is empty");
  std::vector<std::size_t> result;
  for (std::size_t i : subset) {
    if (i >= points.size()) throw IndexError("subset index out of range");
    bool dominated = false;
    for (std::size_t j : subset) {
      if (j != i && dominates(points[j], points[i])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) result.push_back(i);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<std::size_t> find_nondominated(std::span<const ObjectiveVector> points) {
  check_uniform(points);
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return find_nondominated(points, all);
}

FrontPartition pareto_partition_peeling(std::span<const ObjectiveVector> points) {
  check_uniform(points);
  FrontPartition out;
  std::vector<std::size_t> residual(points.size());
  std::iota(residual.begin(), residual.end(), std::size_t{0});
  while (!residual.empty()) {
    auto front = find_nondominated(points, residual);
    std::vector<std::size_t> rest;
    rest.reserve(residual.size() - front.size());
    std::set_difference(residual.begin(), residual.end(), front.begin(), front.end(),
                        std::back_inserter(rest));
    out.fronts.push_back(std::move(front));
    residual = std::move(rest);
  }
  fill_ranks(out, points.size());
  return out;
}

FrontPartition pareto_partition(std::span<const ObjectiveVector> points) {
  check_uniform(points);
  if (points.front().size() == 2) return sweep_2d(points);
  return pareto_partition_peeling(points);
}

std::size_t rank_lookup(const FrontPartition& partition, std::size_t i) {
  if (i >= partition.ranks.size()) {
    throw IndexError("rank_lookup: index " + std::to_string(i) + " out of range");
  }
  return partition.ranks[i];
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> points,
                                      std::span<const std::size_t> front) {
  const std::size_t m = front.size();
  std::vector<double> distance(m, 0.0);
  if (m == 0) return distance;
  if (m <= 2) {
    std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
    return distance;
  }
  const std::size_t K = points[front[0]].size();
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < K; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = points[front[a]][k];
      const double vb = points[front[b]][k];
      return va != vb ? va < vb : front[a] < front[b];
    });
    const double lo = points[front[order.front()]][k];
    const double hi = points[front[order.back()]][k];
    distance[order.front()] = std::numeric_limits<double>::infinity();
    distance[order.back()] = std::numeric_limits<double>::infinity();
    if (hi == lo) continue;
    for (std::size_t r = 1; r + 1 < m; ++r) {
      distance[order[r]] +=
          (points[front[order[r + 1]]][k] - points[front[order[r - 1]]][k]) / (hi - lo);
    }
  }
  return distance;
}

std::vector<std::size_t> select_by_crowding(std::span<const ObjectiveVector> points,
                                            const FrontPartition& partition, std::size_t count) {
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (const auto& front : partition.fronts) {
    if (chosen.size() >= count) break;
    const std::size_t need = count - chosen.size();
    if (front.size() <= need) {
      chosen.insert(chosen.end(), front.begin(), front.end());
      continue;
    }
    const auto cd = crowding_distance(points, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    for (std::size_t r = 0; r < need; ++r) chosen.push_back(front[order[r]]);
  }
  return chosen;
}

}  // namespace molso
