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

#include <benchmark/benchmark.h>

#include <random>

#include "molso/pareto.hpp"

namespace {

std::vector<molso::ObjectiveVector> cloud(std::size_t n, std::size_t k) {
  molso::Rng rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<molso::ObjectiveVector> pts(n, molso::ObjectiveVector(k));
  for (auto& p : pts) {
    for (auto& v : p) v = u(rng);
  }
  return pts;
}

void BM_PartitionSweep2D(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(molso::pareto_partition(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartitionSweep2D)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_PartitionPeeling2D(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(molso::pareto_partition_peeling(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartitionPeeling2D)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_PartitionThreeObjectives(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(molso::pareto_partition(pts));
}
BENCHMARK(BM_PartitionThreeObjectives)->Arg(500)->Arg(2000);

void BM_CrowdingSelection(benchmark::State& state) {
  const auto pts = cloud(250, 2);
  const auto partition = molso::pareto_partition(pts);
  for (auto _ : state) benchmark::DoNotOptimize(molso::select_by_crowding(pts, partition, 50));
}
BENCHMARK(BM_CrowdingSelection);

}  // namespace
