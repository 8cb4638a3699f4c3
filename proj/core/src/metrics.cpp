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

#include "molso/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "molso/error.hpp"
#include "molso/pareto.hpp"

namespace molso {

SummaryStats summary(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("summary of an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t top = (sorted.size() + 9) / 10;
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(top), sorted.end(),
                    std::greater<>());
  SummaryStats s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  for (std::size_t i = 0; i < top; ++i) s.top10_mean += sorted[i];
  s.top10_mean /= static_cast<double>(top);
  return s;
}

std::string to_string(DiversityMetric metric) {
  return metric == DiversityMetric::euclidean ? "euclidean" : "jaccard";
}

DiversityMetric diversity_metric_from_string(const std::string& name) {
  if (name == "euclidean") return DiversityMetric::euclidean;
  if (name == "jaccard") return DiversityMetric::jaccard;
  throw ParameterError("unknown diversity metric '" + name + "'");
}

std::vector<double> median_thresholds(std::span<const Point> points) {
  if (points.empty()) throw EmptyInputError("no points for thresholds");
  const std::size_t d = points.front().size();
  std::vector<double> out(d);
  std::vector<double> column(points.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) column[i] = points[i][j];
    std::sort(column.begin(), column.end());
    const std::size_t n = column.size();
    out[j] = n % 2 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

double diversity(std::span<const Point> points, DiversityMetric metric,
                 std::span<const double> thresholds) {
  const std::size_t n = points.size();
  if (n < 2) throw ParameterError("diversity needs at least two points");
  const std::size_t d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw DimensionError("points differ in dimension");
  }
  double total = 0.0;
  if (metric == DiversityMetric::euclidean) {
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = points[i][k] - points[j][k];
          s += diff * diff;
        }
        row += std::sqrt(s);
      }
      total += row;
    }
  } else {
    if (thresholds.size() != d) throw DimensionError("one threshold per dimension required");
    std::vector<std::vector<bool>> bits(n, std::vector<bool>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) bits[i][k] = points[i][k] > thresholds[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        std::size_t both = 0;
        std::size_t either = 0;
        for (std::size_t k = 0; k < d; ++k) {
          both += bits[i][k] && bits[j][k];
          either += bits[i][k] || bits[j][k];
        }
        row += either ? 1.0 - static_cast<double>(both) / static_cast<double>(either) : 0.0;
      }
      total += row;
    }
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double hypervolume_2d(std::span<const ObjectiveVector> front, std::span<const double> ref) {
  if (ref.size() != 2) throw DimensionError("hypervolume_2d needs a 2-D reference point");
  std::vector<ObjectiveVector> pts(front.begin(), front.end());
  for (const auto& p : pts) {
    if (p.size() != 2) throw DimensionError("hypervolume_2d needs 2-D points");
    if (!dominates(p, ref)) throw ParameterError("front point does not dominate the reference");
  }
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1]; });
  double area = 0.0;
  double level = ref[1];
  for (const auto& p : pts) {
    if (p[1] <= level) continue;
    area += (p[0] - ref[0]) * (p[1] - level);
    level = p[1];
  }
  return area;
}

IterationMetrics snapshot_metrics(std::span<const ObjectiveVector> oriented,
                                  std::span<const Point> points, DiversityMetric metric,
                                  std::span<const double> thresholds) {
  if (oriented.empty()) throw EmptyInputError("empty snapshot");
  if (oriented.size() != points.size()) throw DimensionError("scores and points are misaligned");
  const std::size_t K = oriented.front().size();
  IterationMetrics m;
  m.sample_size = oriented.size();
  std::vector<double> column(oriented.size());
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < oriented.size(); ++i) column[i] = oriented[i][k];
    const auto s = summary(column);
    double var = 0.0;
    for (double v : column) var += (v - s.mean) * (v - s.mean);
    m.mean.push_back(s.mean);
    m.top10_mean.push_back(s.top10_mean);
    m.stddev.push_back(std::sqrt(var / static_cast<double>(column.size())));
  }
  m.diversity = points.size() >= 2 ? diversity(points, metric, thresholds) : 0.0;
  return m;
}

}  // namespace molso
