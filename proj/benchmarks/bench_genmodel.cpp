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

#include "molso/gmm.hpp"
#include "molso/objectives.hpp"
#include "molso/weighting.hpp"

namespace {

void BM_GmmFit(benchmark::State& state) {
  molso::Rng rng(1);
  const auto points =
      molso::sample_uniform_design(static_cast<std::size_t>(state.range(0)), 10, 0.0, 1.0, rng);
  const auto data = molso::WeightedDataset::uniform(points);
  molso::ModelConfig config;
  config.components = 10;
  for (auto _ : state) {
    molso::WeightedGmm gmm(config, 10);
    molso::Rng fit_rng(2);
    benchmark::DoNotOptimize(gmm.fit_weighted(data, molso::TrainingConfig{}, fit_rng));
  }
}
BENCHMARK(BM_GmmFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GmmSample(benchmark::State& state) {
  molso::Rng rng(1);
  const auto data =
      molso::WeightedDataset::uniform(molso::sample_uniform_design(2000, 10, 0.0, 1.0, rng));
  molso::WeightedGmm gmm(molso::ModelConfig{}, 10);
  gmm.fit_weighted(data, molso::TrainingConfig{}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gmm.sample_latent(250, rng));
}
BENCHMARK(BM_GmmSample);

}  // namespace
