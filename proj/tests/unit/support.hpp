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

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "molso/types.hpp"

namespace molso::testing {

inline std::vector<ObjectiveVector> random_points(std::size_t n, std::size_t k, std::uint64_t seed,
                                                  int grid = 0) {
  Rng rng(seed);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  std::uniform_int_distribution<int> ints(0, std::max(grid, 1));
  std::vector<ObjectiveVector> pts(n, ObjectiveVector(k));
  for (auto& p : pts) {
    for (auto& v : p) v = grid > 0 ? static_cast<double>(ints(rng)) : real(rng);
  }
  return pts;
}

inline bool brute_dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    strict = strict || a[i] > b[i];
  }
  return strict;
}

/// All-pairs non-dominated set restricted to `alive`.
inline std::vector<std::size_t> brute_front(const std::vector<ObjectiveVector>& pts,
                                            const std::vector<bool>& alive) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!alive[i]) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      dominated = alive[j] && brute_dominates(pts[j], pts[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> brute_fronts(const std::vector<ObjectiveVector>& pts) {
  std::vector<bool> alive(pts.size(), true);
  std::vector<std::vector<std::size_t>> fronts;
  std::size_t left = pts.size();
  while (left > 0) {
    auto f = brute_front(pts, alive);
    for (std::size_t i : f) alive[i] = false;
    left -= f.size();
    fronts.push_back(std::move(f));
  }
  return fronts;
}

}  // namespace molso::testing
