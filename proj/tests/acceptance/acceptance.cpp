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

// Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
// criterion and exits nonzero if any failed.
//
//   molso_acceptance --cli PATH --echo PATH [--only N]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "molso/autoencoder.hpp"
#include "molso/error.hpp"
#include "molso/evaluator.hpp"
#include "molso/gmm.hpp"
#include "molso/objectives.hpp"
#include "molso/orchestrator.hpp"
#include "molso/pareto.hpp"
#include "molso/serialization.hpp"
#include "molso/surrogate.hpp"
#include "molso/weighting.hpp"

namespace {

using namespace molso;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Independent oracles.

bool oracle_dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
    if (a[k] > b[k]) strict = true;
  }
  return strict;
}

// Brute-force peel: fronts as sorted index lists and cumulative ranks.
std::pair<std::vector<std::vector<std::size_t>>, std::vector<std::size_t>> oracle_peel(
    const std::vector<ObjectiveVector>& pts) {
  std::vector<bool> left(pts.size(), true);
  std::size_t remaining = pts.size();
  std::size_t removed = 0;
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> ranks(pts.size());
  while (remaining > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!left[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        dominated = left[j] && oracle_dominates(pts[j], pts[i]);
      }
      if (!dominated) front.push_back(i);
    }
    for (std::size_t i : front) {
      left[i] = false;
      ranks[i] = removed;
    }
    removed += front.size();
    remaining -= front.size();
    fronts.push_back(std::move(front));
  }
  return {fronts, ranks};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Inverse normal CDF by bisection on erfc; slow but independent of the
// library.
double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Shared synthetic loop.

constexpr std::size_t kSeeds = 5;
constexpr std::size_t kDim = 10;
constexpr std::size_t kD0 = 2000;

std::vector<Point> make_d0(std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform_design(kD0, kDim, 0.0, 1.0, rng);
}

EngineConfig loop_config(std::uint64_t seed, double k, Strategy strategy) {
  EngineConfig cfg;
  cfg.loop.seed = seed;
  cfg.loop.k = k;
  cfg.loop.iterations = 10;
  cfg.loop.strategy = strategy;
  return cfg;
}

LoopState run_loop(std::vector<Point> d0, std::vector<ObjectiveVector> d0_raw,
                   const EngineConfig& cfg, std::span<const ObjectiveSpec> specs) {
  auto state = bootstrap(std::move(d0), std::move(d0_raw), cfg, specs);
  while (state.iteration < cfg.loop.iterations) state = run_iteration(state, cfg, specs);
  return state;
}

// Per-objective standardized shift of the snapshot means between the first
// and last log records.
std::vector<double> standardized_shift(const LoopState& state) {
  const auto& first = state.log.front().metrics;
  const auto& last = state.log.back().metrics;
  std::vector<double> shift(first.mean.size());
  for (std::size_t k = 0; k < shift.size(); ++k) {
    const double pooled =
        std::sqrt(0.5 * (first.stddev[k] * first.stddev[k] + last.stddev[k] * last.stddev[k]));
    shift[k] = (last.mean[k] - first.mean[k]) / pooled;
  }
  return shift;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  const auto start = Clock::now();
  const std::size_t sizes[] = {10, 100, 500};
  const std::size_t widths[] = {2, 3, 5};
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = sizes[t % 3];
    const std::size_t K = widths[(t / 3) % 3];
    Rng rng(1000 + t);
    std::vector<ObjectiveVector> pts(n, ObjectiveVector(K));
    // Every other dataset uses a coarse integer grid to force ties.
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    std::uniform_int_distribution<int> grid(0, 4);
    for (auto& p : pts) {
      for (auto& v : p) v = t % 2 ? static_cast<double>(grid(rng)) : real(rng);
    }
    const auto got = pareto_partition(pts);
    const auto [fronts, ranks] = oracle_peel(pts);
    if (got.fronts != fronts || got.ranks != ranks) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0,
          std::to_string(mismatches) + " mismatching datasets of 100, " + fmt(elapsed) + " s"};
}

Outcome criterion_2() {
  Rng rng(2);
  std::uniform_real_distribution<double> log_k(-6.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 5000);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double k = std::pow(10.0, log_k(rng));
    const std::size_t n = size(rng);
    std::uniform_int_distribution<std::size_t> rank_dist(0, n - 1);
    std::vector<std::size_t> ranks(n, 0);
    const std::size_t pos = rank_dist(rng);
    ranks[pos] = rank_dist(rng);
    const auto w = compute_weights(ranks, k);
    const double expect = 1.0 / (k * static_cast<double>(n) + static_cast<double>(ranks[pos]));
    worst = std::max(worst, std::abs(w[pos] - expect) / expect);
  }
  bool equal_within_fronts = true;
  for (int t = 0; t < 20; ++t) {
    Rng data(200 + t);
    std::uniform_int_distribution<int> grid(0, 9);
    std::vector<ObjectiveVector> pts(300, ObjectiveVector(2));
    for (auto& p : pts) p = {double(grid(data)), double(grid(data))};
    const auto partition = pareto_partition(pts);
    const auto w = compute_weights(partition.ranks, 1e-3);
    for (const auto& front : partition.fronts) {
      for (std::size_t i : front) equal_within_fronts = equal_within_fronts && w[i] == w[front[0]];
    }
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return {worst <= 2 * eps && equal_within_fronts,
          "max relative error " + fmt(worst) + ", within-front equality " +
              (equal_within_fronts ? "exact" : "violated")};
}

Outcome criterion_3() {
  const auto start = Clock::now();
  double worst_interp = 0.0;
  for (int t = 0; t < 5; ++t) {
    Rng rng(30 + t);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Eigen::Index n = 20, m = 3;
    Eigen::MatrixXd X(n, m);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) X(i, j) = u(rng);
      y(i) = std::sin(X(i, 0)) + X(i, 1) * X(i, 2) + 5.0;
    }
    const auto gp = GpSurrogate::fit(X, y);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<double> x(static_cast<std::size_t>(m));
      for (Eigen::Index j = 0; j < m; ++j) x[static_cast<std::size_t>(j)] = X(i, j);
      const double r = std::abs(gp.predict(x).mean - y(i)) / (1.0 + std::abs(y(i)));
      worst_interp = std::max(worst_interp, r);
    }
  }

  // Stratified Monte Carlo: one uniform draw per probability stratum.
  const std::size_t draws = 100000;
  Rng rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> z(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    z[i] = normal_quantile((static_cast<double>(i) + u(rng)) / static_cast<double>(draws));
  }
  const double best = 0.0;
  double worst_ei = 0.0;
  for (int a = 0; a < 20; ++a) {
    const double mean = -1.0 + 3.0 * a / 19.0;
    for (int b = 0; b < 20; ++b) {
      const double sd = 0.5 + 2.0 * b / 19.0;
      double acc = 0.0;
      for (double zi : z) acc += std::max(mean + sd * zi - best, 0.0);
      const double mc = acc / static_cast<double>(draws);
      const double ei = expected_improvement(mean, sd, best);
      worst_ei = std::max(worst_ei, std::abs(ei - mc) / mc);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst_interp <= 1e-6 && worst_ei <= 0.02 && elapsed < 30.0,
          "interpolation " + fmt(worst_interp) + " (scaled), EI vs MC " + fmt(worst_ei) +
              " relative, " + fmt(elapsed) + " s"};
}

Outcome criterion_4() {
  Rng data_rng(40);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> pts(64, Point(6));
  for (auto& p : pts) {
    for (auto& v : p) v = normal(data_rng);
  }
  std::vector<ObjectiveVector> scores;
  for (const auto& p : pts) scores.push_back({p[0], -p[1]});
  const auto ds = WeightedDataset::build(pts, scores, std::vector<Origin>(pts.size()), 1e-3);

  ModelConfig cfg;
  cfg.kind = ModelKind::mini_autoencoder;
  cfg.latent_dim = 3;
  cfg.init_scale = 0.5;
  cfg.init_seed = 41;
  MiniAutoencoder ae(cfg, 6);
  Rng check_rng(42);
  const std::size_t checked = std::min<std::size_t>(ae.parameter_count(), 200);
  const double grad_err = gradient_check(ae, ds, check_rng, checked);

  bool monotone = true;
  double worst_drop = 0.0;
  for (int t = 0; t < 20; ++t) {
    Rng rng(400 + t);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Point> x(300, Point(3));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double shift = static_cast<double>(i % 3) * 3.0;
      for (auto& v : x[i]) v = nd(rng) + shift;
    }
    std::vector<ObjectiveVector> f;
    for (const auto& p : x) f.push_back({p[0], p[2]});
    const auto wds = WeightedDataset::build(x, f, std::vector<Origin>(x.size()), 1e-2);
    ModelConfig gcfg;
    gcfg.components = 4;
    gcfg.init_seed = 500 + t;
    WeightedGmm gmm(gcfg, 3);
    TrainingConfig tc;
    tc.epochs = 60;
    const auto report = gmm.fit_weighted(wds, tc, rng);
    for (std::size_t e = 1; e < report.history.size(); ++e) {
      const double drop = report.history[e - 1] - report.history[e];
      if (drop > 0.0) {
        monotone = false;
        worst_drop = std::max(worst_drop, drop);
      }
    }
  }
  return {checked >= 100 && grad_err <= 1e-4 && monotone,
          "gradient max relative error " + fmt(grad_err) + " over " + std::to_string(checked) +
              " parameters; EM log-likelihood " +
              (monotone ? "non-decreasing in 20 fits" : "dropped by " + fmt(worst_drop))};
}

Outcome criterion_5() {
  const auto specs = builtin_suite("linear-ripple");
  std::size_t ok = 0;
  double slowest = 0.0;
  std::string detail;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto start = Clock::now();
    const auto state = run_loop(make_d0(s), {}, loop_config(s, 1e-3, Strategy::random), specs);
    slowest = std::max(slowest, seconds_since(start));
    const auto shift = standardized_shift(state);
    const bool each = std::all_of(shift.begin(), shift.end(), [](double v) { return v >= 0.3; });
    ok += each;
    detail += " [" + fmt(shift[0], 3) + ", " + fmt(shift[1], 3) + "]";
  }
  return {ok >= 4 && slowest < 300.0, std::to_string(ok) + "/5 seeds; shifts" + detail +
                                          "; slowest seed " + fmt(slowest) + " s"};
}

Outcome criterion_6() {
  const auto specs = builtin_suite("linear-ripple");
  std::size_t ok = 0;
  std::string detail;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto low = run_loop(make_d0(s), {}, loop_config(s, 1e-5, Strategy::random), specs);
    const auto high = run_loop(make_d0(s), {}, loop_config(s, 1e-1, Strategy::random), specs);
    const double shift_low = mean_of(standardized_shift(low));
    const double shift_high = mean_of(standardized_shift(high));
    const double div_low = low.log.back().metrics.diversity;
    const double div_high = high.log.back().metrics.diversity;
    ok += shift_low >= shift_high && div_low <= div_high;
    detail += " [shift " + fmt(shift_low, 3) + " vs " + fmt(shift_high, 3) + ", diversity " +
              fmt(div_low, 3) + " vs " + fmt(div_high, 3) + "]";
  }
  return {ok >= 4, std::to_string(ok) + "/5 seeds (k=1e-5 vs k=1e-1):" + detail};
}

Outcome criterion_7() {
  const auto specs = builtin_suite("linear-ripple");
  std::size_t ok = 0;
  std::string detail;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto d0 = make_d0(s);
    const auto raw = evaluate_batch(specs, d0);
    const auto oriented = orient_all(raw, specs);
    const auto ablation = ablate_top(oriented, 0.2);
    std::vector<Point> kept;
    std::vector<ObjectiveVector> kept_raw;
    for (std::size_t i : ablation.kept) {
      kept.push_back(d0[i]);
      kept_raw.push_back(raw[i]);
    }
    const auto state = run_loop(std::move(kept), std::move(kept_raw),
                                loop_config(s, 1e-5, Strategy::random), specs);
    std::size_t selected = 0, dominating = 0;
    for (const auto& c : state.d_new) {
      if (c.iteration != state.iteration) continue;
      ++selected;
      const auto o = orient(c.raw, specs);
      dominating +=
          std::any_of(ablation.worst_removed_front.begin(), ablation.worst_removed_front.end(),
                      [&](std::size_t i) { return oracle_dominates(o, oriented[i]); });
    }
    const double frac = selected ? static_cast<double>(dominating) / selected : 0.0;
    ok += frac >= 0.10;
    detail += " " + std::to_string(dominating) + "/" + std::to_string(selected);
  }
  return {ok >= 4, std::to_string(ok) + "/5 seeds; dominating candidates" + detail};
}

Outcome criterion_8() {
  const auto specs = builtin_suite("linear-ripple");
  std::size_t ok = 0;
  std::string detail;
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    auto score = [&](Strategy strategy) {
      const auto state = run_loop(make_d0(s), {}, loop_config(s, 1e-3, strategy), specs);
      double total = 0.0;
      for (const auto& c : state.d_new) total += scalarize(c.raw, specs, state.stats);
      return total / static_cast<double>(state.d_new.size());
    };
    const double bo = score(Strategy::bo);
    const double random = score(Strategy::random);
    ok += bo >= random;
    detail += " [" + fmt(bo, 3) + " vs " + fmt(random, 3) + "]";
  }
  return {ok >= 4, std::to_string(ok) + "/5 seeds; bo vs random" + detail};
}

struct Paths {
  std::string cli;
  std::string echo;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

int run_shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir =
      fs::temp_directory_path() / ("molso-acceptance-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome criterion_9(const Paths& paths) {
  Rng rng(9);
  const auto points = sample_uniform_design(10000, 4, -1e3, 1e3, rng);
  const auto replies =
      run_external_evaluator(shell_quote(paths.echo), points, 4, std::chrono::seconds(60));
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < points.size(); ++i) mismatches += replies[i] != points[i];

  const auto dir = scratch_dir("crash");
  const auto command = nlohmann::json(shell_quote(paths.echo) + " --in-order --crash-at 17").dump();
  std::ofstream(dir / "crash.json") << R"({"seed": 1, "output_dir": "out",
            "dataset": {"generate": {"n": 40, "dim": 2}},
            "objectives": [
              {"name": "a", "sense": "max", "command": )"
                                    << command << R"(, "column": 0},
              {"name": "b", "sense": "min", "command": )"
                                    << command << R"(, "column": 1}]})";
  const auto err = dir / "stderr.txt";
  const int code =
      run_shell(shell_quote(paths.cli) + " run --quiet --config " +
                shell_quote((dir / "crash.json").string()) + " 2> " + shell_quote(err.string()));
  const auto message = slurp(err);
  const bool index_reported = message.find("failing point index: 17") != std::string::npos;
  fs::remove_all(dir);
  return {mismatches == 0 && code == 3 && index_reported,
          std::to_string(mismatches) + " mismatches in 10000 echoes; crash exit code " +
              std::to_string(code) + (index_reported ? ", index 17 reported" : ", index missing")};
}

std::string strip_wall_time(const std::string& log) {
  std::string out;
  std::istringstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find(",\"wall_time_s\":");
    out += (pos == std::string::npos ? line : line.substr(0, pos) + "}") + "\n";
  }
  return out;
}

Outcome criterion_10(const Paths& paths) {
  const auto dir = scratch_dir("resume");
  std::ofstream(dir / "config.json") << R"({
    "seed": 11,
    "dataset": {"generate": {"n": 2000, "dim": 10}},
    "objectives": {"suite": "linear-ripple"},
    "loop": {"iterations": 10, "k": 0.001}
  })";
  const auto base = shell_quote(paths.cli) + " run --quiet --config " +
                    shell_quote((dir / "config.json").string()) + " --out ";
  const auto full = dir / "full";
  const auto split = dir / "split";
  const int a = run_shell(base + shell_quote(full.string()));
  const int b = run_shell(base + shell_quote(split.string()) + " --iterations 5");
  const int c = run_shell(base + shell_quote(split.string()) + " --resume");
  const auto log_full = strip_wall_time(slurp(full / "log.jsonl"));
  const auto log_split = strip_wall_time(slurp(split / "log.jsonl"));
  const bool same = a == 0 && b == 0 && c == 0 && !log_full.empty() && log_full == log_split;
  const auto records = std::count(log_full.begin(), log_full.end(), '\n');
  fs::remove_all(dir);
  return {same && records == 11, std::to_string(records) + " log records; resumed log " +
                                     (same ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  Paths paths;
  int only = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli")
      paths.cli = fs::absolute(argv[i + 1]).string();
    else if (flag == "--echo")
      paths.echo = fs::absolute(argv[i + 1]).string();
    else if (flag == "--only")
      only = std::atoi(argv[i + 1]);
  }
  if (paths.cli.empty() || paths.echo.empty()) {
    std::cerr << "usage: molso_acceptance --cli PATH --echo PATH [--only N]\n";
    return 2;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"NDS/rank oracle equivalence", criterion_1},
      {"weight formula exactness", criterion_2},
      {"GP interpolation and EI", criterion_3},
      {"trainer correctness", criterion_4},
      {"distribution shift", criterion_5},
      {"k sensitivity", criterion_6},
      {"incomplete-dataset recovery", criterion_7},
      {"BO advantage", criterion_8},
      {"evaluator protocol", [&] { return criterion_9(paths); }},
      {"determinism and resume", [&] { return criterion_10(paths); }},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only && static_cast<std::size_t>(only) != c + 1) continue;
    Outcome outcome;
    const auto start = Clock::now();
    try {
      outcome = criteria[c].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL", c + 1,
                criteria[c].first.c_str(), outcome.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
