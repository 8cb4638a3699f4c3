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

// Command-line front end: rank, run, ablate, sample and generate.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "molso/dataset_io.hpp"
#include "molso/error.hpp"
#include "molso/genmodel.hpp"
#include "molso/objectives.hpp"
#include "molso/orchestrator.hpp"
#include "molso/pareto.hpp"
#include "molso/run_config.hpp"
#include "molso/serialization.hpp"
#include "molso/weighting.hpp"

namespace {

using namespace molso;

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kEvaluation = 3, kNumerics = 4 };

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void emit(const std::string& path, const Table& table) {
  if (path.empty() || path == "-") {
    std::cout << format_table(table);
  } else {
    write_table(path, table);
  }
}

// Objective specs for a table without a configuration: either a built-in
// suite or plain senses (default: maximize everything).
std::vector<ObjectiveSpec> specs_for(std::size_t count, const std::string& suite,
                                     const std::string& senses) {
  if (!suite.empty()) {
    auto specs = builtin_suite(suite);
    if (specs.size() != count) {
      throw ConfigError("suite " + suite + " has " + std::to_string(specs.size()) +
                        " objectives, input has " + std::to_string(count));
    }
    return specs;
  }
  std::vector<ObjectiveSpec> specs(count);
  const auto list = senses.empty() ? std::vector<std::string>{} : split_list(senses);
  if (!list.empty() && list.size() != count) {
    throw ConfigError("--senses lists " + std::to_string(list.size()) + " entries for " +
                      std::to_string(count) + " objectives");
  }
  for (std::size_t k = 0; k < count; ++k) {
    specs[k].name = "f" + std::to_string(k);
    specs[k].source = BuiltinSource{};
    if (!list.empty()) specs[k].sense = sense_from_string(list[k]);
  }
  return specs;
}

// Objective columns for `rank`: the named ones or every f column.
std::vector<std::size_t> objective_columns(const Table& table, const std::string& columns) {
  std::vector<std::size_t> cols;
  if (!columns.empty()) {
    for (const auto& name : split_list(columns)) cols.push_back(table.column(name));
    return cols;
  }
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const auto& h = table.header[j];
    if (h.size() > 1 && h[0] == 'f' && h.find_first_not_of("0123456789", 1) == std::string::npos) {
      cols.push_back(j);
    }
  }
  if (cols.empty()) throw ParseError("input has no objective columns f0, f1, ...", 1);
  return cols;
}

struct RankArgs {
  std::string input, columns, senses, suite, out;
  std::optional<double> k;
};

int cmd_rank(const RankArgs& a) {
  const auto table = read_table(a.input);
  if (table.rows.empty()) throw ParseError("dataset has no rows", 0);
  const auto cols = objective_columns(table, a.columns);
  const auto specs = specs_for(cols.size(), a.suite, a.senses);

  std::vector<ObjectiveVector> raw;
  for (const auto& row : table.rows) {
    ObjectiveVector f;
    for (std::size_t c : cols) f.push_back(row[c]);
    raw.push_back(std::move(f));
  }
  const auto partition = pareto_partition(orient_all(raw, specs));
  std::vector<double> weights;
  if (a.k) weights = compute_weights(partition.ranks, *a.k);

  // Keep the x and f columns of the input, drop any earlier ranking output.
  Table out;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const auto& h = table.header[j];
    if (h == "front" || h == "rank" || h == "weight") continue;
    keep.push_back(j);
    out.header.push_back(h);
  }
  out.header.insert(out.header.end(), {"front", "rank"});
  if (a.k) out.header.push_back("weight");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<double> row;
    for (std::size_t j : keep) row.push_back(table.rows[i][j]);
    row.push_back(static_cast<double>(partition.front_of[i] + 1));
    row.push_back(static_cast<double>(partition.ranks[i]));
    if (a.k) row.push_back(weights[i]);
    out.rows.push_back(std::move(row));
  }
  emit(a.out, out);
  return kOk;
}

struct RunArgs {
  std::string config, strategy, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> k;
  std::optional<std::size_t> iterations;
  bool resume = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  auto cfg = load_run_config(a.config);
  auto& loop = cfg.engine.loop;
  if (a.seed) loop.seed = *a.seed;
  if (!a.strategy.empty()) {
    try {
      loop.strategy = strategy_from_string(a.strategy);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  if (a.k) loop.k = *a.k;
  if (a.iterations) loop.iterations = *a.iterations;
  if (!a.out.empty()) cfg.output_dir = a.out;
  try {
    loop.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  RunOptions options;
  options.output_dir = cfg.output_dir;
  options.resume = a.resume;
  if (!a.quiet) {
    options.on_iteration = [](const IterationRecord& r) { std::cerr << log_line(r) << '\n'; };
  }
  Dataset d0;
  // A resumed run takes D0 from its checkpoint.
  if (!(a.resume && std::filesystem::exists(cfg.output_dir / "checkpoints" / "LATEST"))) {
    d0 = load_initial_data(cfg);
  }
  run(cfg.engine, std::move(d0.points), std::move(d0.objectives), cfg.objectives, options);
  return kOk;
}

struct AblateArgs {
  std::string input, senses, suite, out, removed;
  double frac = 0.2;
};

int cmd_ablate(const AblateArgs& a) {
  auto ds = read_dataset(a.input);
  if (ds.objectives.empty()) {
    if (a.suite.empty()) throw ConfigError("input has no objective columns; pass --suite");
    ds.objectives = evaluate_batch(builtin_suite(a.suite), ds.points);
  }
  const auto specs = specs_for(ds.objectives.front().size(), a.suite, a.senses);
  const auto result = ablate_top(orient_all(ds.objectives, specs), a.frac);

  auto subset = [&](const std::vector<std::size_t>& idx) {
    Dataset part;
    for (std::size_t i : idx) {
      part.points.push_back(ds.points[i]);
      part.objectives.push_back(ds.objectives[i]);
    }
    return dataset_to_table(part);
  };
  emit(a.out, subset(result.kept));
  if (!a.removed.empty()) {
    auto audit = subset(result.removed);
    audit.header.push_back("index");
    for (std::size_t r = 0; r < result.removed.size(); ++r) {
      audit.rows[r].push_back(static_cast<double>(result.removed[r]));
    }
    write_table(a.removed, audit);
  }
  return kOk;
}

struct SampleArgs {
  std::string checkpoint, suite, config, out;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a) {
  if (a.n == 0) throw ConfigError("--n must be positive");
  std::vector<ObjectiveSpec> specs;
  EvaluatorOptions evaluator;
  evaluator.timeout = evaluator_timeout_from_env(evaluator.timeout);
  if (!a.config.empty()) {
    auto cfg = load_run_config(a.config);
    specs = cfg.objectives;
    evaluator = cfg.engine.evaluator;
  } else if (!a.suite.empty()) {
    specs = builtin_suite(a.suite);
  } else {
    throw ConfigError("sample needs --suite or --config to evaluate objectives");
  }
  const auto model = restore_model(load_checkpoint(a.checkpoint));
  Rng rng(a.seed);
  Dataset ds;
  for (const auto& z : model->sample_latent(a.n, rng)) ds.points.push_back(model->decode(z));
  ds.objectives = evaluate_batch(specs, ds.points, evaluator);
  emit(a.out, dataset_to_table(ds));
  return kOk;
}

struct GenerateArgs {
  std::string suite, out;
  std::size_t n = 0, dim = 0;
  double low = 0.0, high = 1.0;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.n == 0 || a.dim == 0) throw ConfigError("--n and --dim must be positive");
  if (!(a.low < a.high)) throw ConfigError("--low must be below --high");
  Rng rng(a.seed);
  Dataset ds;
  ds.points = sample_uniform_design(a.n, a.dim, a.low, a.high, rng);
  if (!a.suite.empty()) ds.objectives = evaluate_batch(builtin_suite(a.suite), ds.points);
  emit(a.out, dataset_to_table(ds));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molso: multi-objective latent space optimization by weighted retraining"};
  app.require_subcommand(1);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Pareto fronts, cumulative ranks and weights");
  rank_cmd->add_option("--input", rank.input, "Dataset CSV")->required();
  rank_cmd->add_option("--columns", rank.columns, "Objective columns (default: all f columns)");
  rank_cmd->add_option("--senses", rank.senses, "Comma-separated max/min per objective");
  rank_cmd->add_option("--suite", rank.suite, "Take senses from a built-in suite");
  rank_cmd->add_option("--k", rank.k, "Also write weights 1/(kN + rank)")
      ->check(CLI::PositiveNumber);
  rank_cmd->add_option("--out", rank.out, "Output CSV (default: stdout)");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Weighted-retraining optimization loop");
  run_cmd->add_option("--config", run_args.config, "Run configuration (JSON)")->required();
  run_cmd->add_option("--seed", run_args.seed, "Override the seed");
  run_cmd->add_option("--strategy", run_args.strategy, "Override the strategy")
      ->check(CLI::IsMember({"random", "bo"}));
  run_cmd->add_option("--k", run_args.k, "Override k")->check(CLI::PositiveNumber);
  run_cmd->add_option("--iterations", run_args.iterations, "Override the cycle count");
  run_cmd->add_flag("--resume", run_args.resume, "Continue from the latest checkpoint");
  run_cmd->add_option("--out", run_args.out, "Override the output directory");
  run_cmd->add_flag("--quiet", run_args.quiet, "Do not echo log records to stderr");

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Remove the best fraction of a dataset");
  ablate_cmd->add_option("--input", ablate.input, "Dataset CSV")->required();
  ablate_cmd->add_option("--frac", ablate.frac, "Fraction to remove")->check(CLI::Range(0.0, 1.0));
  ablate_cmd->add_option("--senses", ablate.senses, "Comma-separated max/min per objective");
  ablate_cmd->add_option("--suite", ablate.suite, "Built-in suite (senses and scoring)");
  ablate_cmd->add_option("--out", ablate.out, "Remaining rows (default: stdout)");
  ablate_cmd->add_option("--removed", ablate.removed, "Audit file for the removed rows");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Decode and score prior samples of a model");
  sample_cmd->add_option("--checkpoint", sample.checkpoint, "Model or state checkpoint")
      ->required();
  sample_cmd->add_option("--n", sample.n, "Number of samples")->required();
  sample_cmd->add_option("--seed", sample.seed, "Sampling seed");
  sample_cmd->add_option("--suite", sample.suite, "Built-in objective suite");
  sample_cmd->add_option("--config", sample.config, "Take objectives from a run configuration");
  sample_cmd->add_option("--out", sample.out, "Output CSV (default: stdout)");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Uniform random design points");
  gen_cmd->add_option("--n", gen.n, "Number of points")->required();
  gen_cmd->add_option("--dim", gen.dim, "Dimension")->required();
  gen_cmd->add_option("--low", gen.low, "Lower bound");
  gen_cmd->add_option("--high", gen.high, "Upper bound");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--suite", gen.suite, "Also score with a built-in suite");
  gen_cmd->add_option("--out", gen.out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*rank_cmd) return cmd_rank(rank);
    if (*run_cmd) return cmd_run(run_args);
    if (*ablate_cmd) return cmd_ablate(ablate);
    if (*sample_cmd) return cmd_sample(sample);
    if (*gen_cmd) return cmd_generate(gen);
  } catch (const EvaluationError& e) {
    std::cerr << "molso: evaluation error: " << e.what() << '\n';
    if (e.point_index()) std::cerr << "molso: failing point index: " << *e.point_index() << '\n';
    return kEvaluation;
  } catch (const NumericalError& e) {
    std::cerr << "molso: numerical error: " << e.what() << '\n';
    return kNumerics;
  } catch (const ConfigError& e) {
    std::cerr << "molso: configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "molso: parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParameterError& e) {
    std::cerr << "molso: invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "molso: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
