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

#include "molso/orchestrator.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "molso/dataset_io.hpp"
#include "molso/error.hpp"
#include "molso/serialization.hpp"
#include "molso/weighting.hpp"

namespace molso {
namespace {

std::size_t ceil_fraction(double frac, std::size_t n) {
  // Guard against 0.1 * 2000 landing a hair above 200.
  const double raw = frac * static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

bool near_duplicate(const Point& a, const Point& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > tol) return false;
  }
  return true;
}

std::vector<Point> decode_all(const GenerativeModel& model, const std::vector<Point>& latents) {
  std::vector<Point> out;
  out.reserve(latents.size());
  for (const auto& z : latents) out.push_back(model.decode(z));
  return out;
}

// Holds an exclusive advisory lock on <dir>/.lock for the lifetime of a run.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir) {
    const auto path = dir / ".lock";
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot create lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error("output directory " + dir.string() + " is in use by another run");
    }
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  int fd_ = -1;
};

std::string iteration_tag(std::size_t iteration) {
  std::string s = std::to_string(iteration);
  return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

void write_outputs(const LoopState& state, const std::filesystem::path& dir) {
  const auto ckpt_dir = dir / "checkpoints";
  const auto tag = iteration_tag(state.iteration);
  write_file_atomic(ckpt_dir / ("model-" + tag + ".json"),
                    checkpoint_to_json(state.model->checkpoint()));
  write_file_atomic(ckpt_dir / ("state-" + tag + ".json"), state_to_json(state));
  std::string log;
  for (const auto& r : state.log) log += log_line(r) + "\n";
  write_file_atomic(dir / "log.jsonl", log);
  write_file_atomic(ckpt_dir / "LATEST", "state-" + tag + ".json\n");
}

}  // namespace

std::string to_string(Strategy strategy) { return strategy == Strategy::random ? "random" : "bo"; }

Strategy strategy_from_string(const std::string& name) {
  if (name == "random") return Strategy::random;
  if (name == "bo") return Strategy::bo;
  throw ParameterError("unknown strategy '" + name + "' (expected random or bo)");
}

std::string to_string(TieBreak tie_break) {
  return tie_break == TieBreak::crowding ? "crowding" : "random";
}

TieBreak tie_break_from_string(const std::string& name) {
  if (name == "crowding") return TieBreak::crowding;
  if (name == "random") return TieBreak::random;
  throw ParameterError("unknown tie-break '" + name + "'");
}

void LoopConfig::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ParameterError("k must be positive");
  if (n_random == 0 || top_r == 0) throw ParameterError("n_random and top_r must be positive");
  if (top_r > n_random) throw ParameterError("top_r must not exceed n_random");
  if (!(subset_frac > 0.0) || subset_frac > 1.0) {
    throw ParameterError("subset_frac must lie in (0, 1]");
  }
  if (retrain_epochs == 0 || baseline_epochs == 0) throw ParameterError("epochs must be positive");
  if (bo_batch == 0) throw ParameterError("bo_batch must be positive");
  if (stats_sample < 2) throw ParameterError("stats_sample must be at least 2");
  if (gp_max_points < 2) throw ParameterError("gp_max_points must be at least 2");
  if (!(dedup_tolerance >= 0.0)) throw ParameterError("dedup_tolerance must be nonnegative");
}

LoopState::LoopState(const LoopState& o)
    : d0(o.d0),
      d0_raw(o.d0_raw),
      d0_subset(o.d0_subset),
      d_new(o.d_new),
      model(o.model ? o.model->clone() : nullptr),
      iteration(o.iteration),
      log(o.log),
      seed(o.seed),
      stats(o.stats),
      thresholds(o.thresholds) {}

LoopState& LoopState::operator=(const LoopState& o) {
  if (this != &o) {
    LoopState copy(o);
    *this = std::move(copy);
  }
  return *this;
}

std::vector<Point> LoopState::d_train_points() const {
  std::vector<Point> out;
  out.reserve(d_train_size());
  for (std::size_t i : d0_subset) out.push_back(d0[i]);
  for (const auto& c : d_new) out.push_back(c.x);
  return out;
}

std::vector<ObjectiveVector> LoopState::d_train_raw() const {
  std::vector<ObjectiveVector> out;
  out.reserve(d_train_size());
  for (std::size_t i : d0_subset) out.push_back(d0_raw[i]);
  for (const auto& c : d_new) out.push_back(c.raw);
  return out;
}

Rng derive_rng(std::uint64_t seed, std::uint64_t iteration, Stream purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration),
                    static_cast<std::uint32_t>(iteration >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

std::unique_ptr<GenerativeModel> train_baseline(const std::vector<Point>& d0,
                                                const ModelConfig& model,
                                                const TrainingConfig& training, Rng& rng,
                                                FitReport* report) {
  if (d0.empty()) throw EmptyInputError("baseline training needs a nonempty dataset");
  auto m = make_model(model, d0.front().size());
  auto r = m->fit_weighted(WeightedDataset::uniform(d0), training, rng);
  if (report) *report = std::move(r);
  return m;
}

IterationMetrics take_snapshot(const GenerativeModel& model, std::span<const ObjectiveSpec> specs,
                               std::size_t n, Rng& rng, const LoopConfig& loop,
                               std::span<const double> thresholds,
                               const EvaluatorOptions& evaluator) {
  const auto points = decode_all(model, model.sample_latent(n, rng));
  const auto raw = evaluate_batch(specs, points, evaluator);
  return snapshot_metrics(orient_all(raw, specs), points, loop.diversity_metric, thresholds);
}

LoopState bootstrap(std::vector<Point> d0, std::vector<ObjectiveVector> d0_raw,
                    const EngineConfig& config, std::span<const ObjectiveSpec> specs) {
  config.loop.validate();
  if (d0.empty()) throw EmptyInputError("initial dataset is empty");
  const auto start = std::chrono::steady_clock::now();

  LoopState state;
  state.seed = config.loop.seed;
  if (d0_raw.empty()) d0_raw = evaluate_batch(specs, d0, config.evaluator);
  if (d0_raw.size() != d0.size()) throw DimensionError("D0 scores do not match D0 points");
  for (const auto& r : d0_raw) {
    if (r.size() != specs.size()) throw DimensionError("D0 score width does not match objectives");
  }
  state.stats = StandardizationStats::from_scores(d0_raw);
  state.thresholds = median_thresholds(d0);
  state.d0 = std::move(d0);
  state.d0_raw = std::move(d0_raw);
  state.d0_subset.resize(state.d0.size());
  std::iota(state.d0_subset.begin(), state.d0_subset.end(), std::size_t{0});

  ModelConfig model = config.model;
  model.init_seed = derive_rng(state.seed, 0, Stream::model_init)();
  TrainingConfig training = config.training;
  training.epochs = config.loop.baseline_epochs;
  Rng rng = derive_rng(state.seed, 0, Stream::baseline);
  FitReport report;
  state.model = train_baseline(state.d0, model, training, rng, &report);

  Rng snap = derive_rng(state.seed, 0, Stream::snapshot);
  IterationRecord record;
  record.iteration = 0;
  record.metrics = take_snapshot(*state.model, specs, config.loop.stats_sample, snap, config.loop,
                                 state.thresholds, config.evaluator);
  record.d_new_size = 0;
  record.d_train_size = state.d_train_size();
  record.weighted_loss = report.weighted_loss;
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  state.log.push_back(std::move(record));
  return state;
}

std::vector<std::size_t> select_candidates(std::span<const ObjectiveVector> oriented,
                                           std::size_t top_r, TieBreak tie_break, Rng& rng) {
  const auto partition = pareto_partition(oriented);
  if (tie_break == TieBreak::crowding) return select_by_crowding(oriented, partition, top_r);
  std::vector<std::size_t> chosen;
  for (const auto& front : partition.fronts) {
    if (chosen.size() >= top_r) break;
    const std::size_t need = top_r - chosen.size();
    if (front.size() <= need) {
      chosen.insert(chosen.end(), front.begin(), front.end());
    } else {
      auto shuffled = front;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      chosen.insert(chosen.end(), shuffled.begin(),
                    shuffled.begin() + static_cast<std::ptrdiff_t>(need));
    }
  }
  return chosen;
}

LoopState run_iteration(const LoopState& state, const EngineConfig& config,
                        std::span<const ObjectiveSpec> specs) {
  const auto& loop = config.loop;
  loop.validate();
  if (!state.model) throw ParameterError("loop state has no model");
  const auto start = std::chrono::steady_clock::now();

  LoopState next = state;
  const std::size_t it = state.iteration + 1;
  next.iteration = it;

  // (1) Score any unscored initial data.
  if (next.d0_raw.empty()) next.d0_raw = evaluate_batch(specs, next.d0, config.evaluator);

  // (2) Rank the training set and weight it with N = |D_train|.
  auto points = next.d_train_points();
  auto raw = next.d_train_raw();
  std::vector<Origin> origin(next.d0_subset.size(), Origin::original);
  origin.resize(points.size(), Origin::candidate);
  const auto dataset =
      WeightedDataset::build(points, orient_all(raw, specs), std::move(origin), loop.k);

  // (3) Weighted retraining.
  TrainingConfig training = config.training;
  training.epochs = loop.retrain_epochs;
  Rng fit_rng = derive_rng(state.seed, it, Stream::fit);
  const auto report = next.model->fit_weighted(dataset, training, fit_rng);

  // (4) Generate candidates.
  Rng cand_rng = derive_rng(state.seed, it, Stream::candidates);
  std::vector<Point> chosen;
  std::vector<ObjectiveVector> chosen_raw;
  if (loop.strategy == Strategy::random) {
    auto generated = decode_all(*next.model, next.model->sample_latent(loop.n_random, cand_rng));
    auto gen_raw = evaluate_batch(specs, generated, config.evaluator);
    const auto picks =
        select_candidates(orient_all(gen_raw, specs), loop.top_r, loop.tie_break, cand_rng);
    for (std::size_t i : picks) {
      chosen.push_back(std::move(generated[i]));
      chosen_raw.push_back(std::move(gen_raw[i]));
    }
  } else {
    std::vector<double> scores(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      scores[i] = scalarize(raw[i], specs, next.stats);
    }
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(std::min(order.size(), loop.gp_max_points));

    const auto m = static_cast<Eigen::Index>(next.model->latent_dim());
    Eigen::MatrixXd latents(static_cast<Eigen::Index>(order.size()), m);
    Eigen::VectorXd targets(static_cast<Eigen::Index>(order.size()));
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto z = next.model->encode(points[order[r]]);
      for (Eigen::Index j = 0; j < m; ++j) {
        latents(static_cast<Eigen::Index>(r), j) = z[static_cast<std::size_t>(j)];
      }
      targets(static_cast<Eigen::Index>(r)) = scores[order[r]];
    }
    const auto gp = GpSurrogate::fit(latents, targets);
    const auto bounds = LatentBounds::from_training(latents);
    // Multistarts come from the retrained model, so the reweighting steers
    // the acquisition search.
    const auto starts = next.model->sample_latent(config.proposal.random_starts, cand_rng);
    chosen = decode_all(
        *next.model, propose_batch(gp, bounds, loop.bo_batch, cand_rng, config.proposal, starts));
    chosen_raw = evaluate_batch(specs, chosen, config.evaluator);
  }

  // (5) Augment D_new with the candidates that are new.
  const double tol = loop.dedup_tolerance;
  for (std::size_t c = 0; c < chosen.size(); ++c) {
    const auto& x = chosen[c];
    auto dup = [&](const Point& p) { return near_duplicate(x, p, tol); };
    const bool seen = std::any_of(next.d_new.begin(), next.d_new.end(),
                                  [&](const Candidate& e) { return dup(e.x); }) ||
                      std::any_of(next.d0.begin(), next.d0.end(), dup);
    if (seen) continue;
    next.d_new.push_back({x, chosen_raw[c], it});
  }

  // (6) Fresh random subset of D0.
  Rng subset_rng = derive_rng(state.seed, it, Stream::subset);
  std::vector<std::size_t> all(next.d0.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), subset_rng);
  all.resize(std::max<std::size_t>(1, ceil_fraction(loop.subset_frac, next.d0.size())));
  std::sort(all.begin(), all.end());
  next.d0_subset = std::move(all);

  // (7) Snapshot of the retrained model.
  Rng snap = derive_rng(state.seed, it, Stream::snapshot);
  IterationRecord record;
  record.iteration = it;
  record.metrics = take_snapshot(*next.model, specs, loop.stats_sample, snap, loop, next.thresholds,
                                 config.evaluator);
  record.d_new_size = next.d_new.size();
  record.d_train_size = points.size();
  record.weighted_loss = report.weighted_loss;
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  next.log.push_back(std::move(record));
  return next;
}

AblationResult ablate_top(std::span<const ObjectiveVector> oriented, double frac) {
  if (!(frac > 0.0) || !(frac < 1.0)) throw ParameterError("ablation fraction must lie in (0, 1)");
  const auto partition = pareto_partition(oriented);
  const std::size_t n = oriented.size();
  const std::size_t target = ceil_fraction(frac, n);

  AblationResult result;
  result.removed = select_by_crowding(oriented, partition, target);
  std::vector<bool> gone(n, false);
  std::size_t worst = 0;
  for (std::size_t i : result.removed) {
    gone[i] = true;
    worst = std::max(worst, partition.front_of[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!gone[i]) result.kept.push_back(i);
  }
  for (std::size_t i : partition.fronts[worst]) {
    if (gone[i]) result.worst_removed_front.push_back(i);
  }
  return result;
}

std::vector<RankedCandidate> rank_candidates(const LoopState& state,
                                             std::span<const ObjectiveSpec> specs) {
  std::vector<RankedCandidate> out;
  if (state.d_new.empty()) return out;
  std::vector<ObjectiveVector> oriented;
  for (const auto& c : state.d_new) oriented.push_back(orient(c.raw, specs));
  const auto partition = pareto_partition(oriented);
  for (std::size_t f = 0; f < partition.fronts.size(); ++f) {
    const auto& front = partition.fronts[f];
    const auto cd = crowding_distance(oriented, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    for (std::size_t r : order) out.push_back({front[r], f, cd[r]});
  }
  return out;
}

LoopState run(const EngineConfig& config, std::vector<Point> d0,
              std::vector<ObjectiveVector> d0_raw, std::span<const ObjectiveSpec> specs,
              const RunOptions& options) {
  config.loop.validate();
  const auto& dir = options.output_dir;
  std::filesystem::create_directories(dir / "checkpoints");
  DirectoryLock lock(dir);

  LoopState state;
  const auto latest = dir / "checkpoints" / "LATEST";
  if (options.resume && std::filesystem::exists(latest)) {
    std::string name = read_file(latest);
    while (!name.empty() && (name.back() == '\n' || name.back() == '\r')) name.pop_back();
    state = state_from_json(read_file(dir / "checkpoints" / name));
    if (state.seed != config.loop.seed) {
      throw ConfigError("checkpoint was written with seed " + std::to_string(state.seed) +
                        ", configuration says " + std::to_string(config.loop.seed));
    }
    if (!d0.empty() && state.model->data_dim() != d0.front().size()) {
      throw ConfigError("checkpoint dimension does not match the dataset");
    }
  } else {
    state = bootstrap(std::move(d0), std::move(d0_raw), config, specs);
    write_outputs(state, dir);
    if (options.on_iteration) options.on_iteration(state.log.back());
  }

  while (state.iteration < config.loop.iterations) {
    state = run_iteration(state, config, specs);
    write_outputs(state, dir);
    if (options.on_iteration) options.on_iteration(state.log.back());
  }

  Table table;
  const std::size_t d = state.d0.front().size();
  for (std::size_t j = 0; j < d; ++j) table.header.push_back("x" + std::to_string(j));
  for (std::size_t k = 0; k < specs.size(); ++k) table.header.push_back("f" + std::to_string(k));
  table.header.insert(table.header.end(), {"front", "crowding", "iteration"});
  for (const auto& rc : rank_candidates(state, specs)) {
    const auto& c = state.d_new[rc.index];
    std::vector<double> row(c.x.begin(), c.x.end());
    row.insert(row.end(), c.raw.begin(), c.raw.end());
    row.push_back(static_cast<double>(rc.front + 1));
    row.push_back(rc.crowding);
    row.push_back(static_cast<double>(c.iteration));
    table.rows.push_back(std::move(row));
  }
  write_table(dir / "candidates.csv", table);
  return state;
}

}  // namespace molso
