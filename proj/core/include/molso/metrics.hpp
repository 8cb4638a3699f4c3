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
#include <string>
#include <vector>

#include "molso/types.hpp"

namespace molso {

struct SummaryStats {
  double mean = 0.0;
  double top10_mean = 0.0;  ///< mean of the ceil(0.1 n) largest values
};

/// Throws EmptyInputError for an empty list.
SummaryStats summary(std::span<const double> values);

enum class DiversityMetric { euclidean, jaccard };

std::string to_string(DiversityMetric metric);
DiversityMetric diversity_metric_from_string(const std::string& name);

/// Per-dimension medians; the binarization thresholds for the Jaccard metric.
std::vector<double> median_thresholds(std::span<const Point> points);

/// Mean distance over all n(n-1)/2 unordered pairs. The Jaccard metric
/// binarizes each coordinate as x_j > thresholds[j] and uses 1 - |A & B| / |A | B|
/// (0 when both sets are empty). Throws ParameterError for n < 2.
double diversity(std::span<const Point> points, DiversityMetric metric = DiversityMetric::euclidean,
                 std::span<const double> thresholds = {});

/// Exact area dominated by `front` (oriented, K = 2) and bounded below by
/// `ref`. Every point must dominate `ref`; dominated points add nothing.
double hypervolume_2d(std::span<const ObjectiveVector> front, std::span<const double> ref);

/// Statistics of one snapshot of oriented objective scores.
struct IterationMetrics {
  std::vector<double> mean;
  std::vector<double> top10_mean;
  std::vector<double> stddev;  ///< population standard deviation
  double diversity = 0.0;
  std::size_t sample_size = 0;
};

IterationMetrics snapshot_metrics(std::span<const ObjectiveVector> oriented,
                                  std::span<const Point> points, DiversityMetric metric,
                                  std::span<const double> thresholds = {});

}  // namespace molso
