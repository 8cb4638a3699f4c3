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

#include <cmath>

#include "molso/surrogate.hpp"

namespace {

struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Problem make_problem(Eigen::Index n, Eigen::Index m) {
  molso::Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Problem p{Eigen::MatrixXd(n, m), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < p.x.size(); ++i) p.x(i) = u(rng);
  for (Eigen::Index i = 0; i < n; ++i) p.y(i) = std::sin(3.0 * p.x.row(i).sum());
  return p;
}

void BM_GpFitGrid(benchmark::State& state) {
  const auto p = make_problem(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(molso::GpSurrogate::fit(p.x, p.y));
}
BENCHMARK(BM_GpFitGrid)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_GpPredictBatch(benchmark::State& state) {
  const auto p = make_problem(400, 10);
  const auto gp = molso::GpSurrogate::fit(p.x, p.y);
  const auto q = make_problem(1024, 10);
  Eigen::VectorXd mean, sd;
  for (auto _ : state) {
    gp.predict_batch(q.x, mean, sd);
    benchmark::DoNotOptimize(mean.data());
  }
}
BENCHMARK(BM_GpPredictBatch)->Unit(benchmark::kMicrosecond);

void BM_ProposeBatch(benchmark::State& state) {
  const auto p = make_problem(200, 10);
  const auto gp = molso::GpSurrogate::fit(p.x, p.y);
  const auto bounds = molso::LatentBounds::from_training(p.x);
  molso::ProposalOptions options;
  options.random_starts = 256;
  options.refine_steps = 20;
  molso::Rng rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        molso::propose_batch(gp, bounds, static_cast<std::size_t>(state.range(0)), rng, options));
  }
}
BENCHMARK(BM_ProposeBatch)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
