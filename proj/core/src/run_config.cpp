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

#include "molso/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <nlohmann/json.hpp>

#include "molso/error.hpp"
#include "molso/serialization.hpp"

namespace molso {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_real(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
  return x;
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(where + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

template <typename T>
void maybe_real(const json& obj, const char* key, const std::string& where, T& out) {
  if (obj.contains(key)) out = get_real(obj, key, where);
}

template <typename T>
void maybe_count(const json& obj, const char* key, const std::string& where, T& out) {
  if (obj.contains(key)) out = static_cast<T>(get_count(obj, key, where));
}

// Re-raises enum parse failures as configuration errors.
template <typename F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

void parse_loop(const json& j, LoopConfig& loop) {
  const std::string w = "loop";
  check_keys(
      j, w,
      {"k", "iterations", "n_random", "top_r", "subset_frac", "retrain_epochs", "baseline_epochs",
       "strategy", "bo_batch", "stats_sample", "tie_break", "gp_max_points", "dedup_tolerance"});
  maybe_real(j, "k", w, loop.k);
  maybe_count(j, "iterations", w, loop.iterations);
  maybe_count(j, "n_random", w, loop.n_random);
  maybe_count(j, "top_r", w, loop.top_r);
  maybe_real(j, "subset_frac", w, loop.subset_frac);
  maybe_count(j, "retrain_epochs", w, loop.retrain_epochs);
  maybe_count(j, "baseline_epochs", w, loop.baseline_epochs);
  if (j.contains("strategy")) {
    const auto s = get_string(j, "strategy", w);
    loop.strategy = as_config([&] { return strategy_from_string(s); });
  }
  maybe_count(j, "bo_batch", w, loop.bo_batch);
  maybe_count(j, "stats_sample", w, loop.stats_sample);
  if (j.contains("tie_break")) {
    const auto s = get_string(j, "tie_break", w);
    loop.tie_break = as_config([&] { return tie_break_from_string(s); });
  }
  maybe_count(j, "gp_max_points", w, loop.gp_max_points);
  maybe_real(j, "dedup_tolerance", w, loop.dedup_tolerance);
}

void parse_model(const json& j, ModelConfig& model) {
  const std::string w = "model";
  check_keys(j, w,
             {"kind", "components", "covariance_floor", "max_em_iterations", "em_tolerance",
              "latent_dim", "hidden", "beta", "sigma_dec", "activation", "init_scale"});
  if (j.contains("kind")) {
    const auto s = get_string(j, "kind", w);
    model.kind = as_config([&] { return model_kind_from_string(s); });
  }
  maybe_count(j, "components", w, model.components);
  maybe_real(j, "covariance_floor", w, model.covariance_floor);
  maybe_count(j, "max_em_iterations", w, model.max_em_iterations);
  maybe_real(j, "em_tolerance", w, model.em_tolerance);
  maybe_count(j, "latent_dim", w, model.latent_dim);
  maybe_count(j, "hidden", w, model.hidden);
  maybe_real(j, "beta", w, model.beta);
  maybe_real(j, "sigma_dec", w, model.sigma_dec);
  maybe_real(j, "init_scale", w, model.init_scale);
  if (j.contains("activation")) {
    const auto s = get_string(j, "activation", w);
    if (s == "tanh") {
      model.activation = Activation::tanh;
    } else if (s == "identity") {
      model.activation = Activation::identity;
    } else {
      throw ConfigError("model.activation must be tanh or identity");
    }
  }
  if (model.components == 0) throw ConfigError("model.components must be positive");
  if (model.latent_dim == 0 || model.hidden == 0) {
    throw ConfigError("model.latent_dim and model.hidden must be positive");
  }
}

void parse_training(const json& j, TrainingConfig& training) {
  const std::string w = "training";
  check_keys(j, w, {"learning_rate", "batch_size", "weighting_mode"});
  maybe_real(j, "learning_rate", w, training.learning_rate);
  maybe_count(j, "batch_size", w, training.batch_size);
  if (j.contains("weighting_mode")) {
    const auto s = get_string(j, "weighting_mode", w);
    training.weighting_mode = as_config([&] { return weighting_mode_from_string(s); });
  }
  if (!(training.learning_rate > 0.0) || training.batch_size == 0) {
    throw ConfigError("training.learning_rate and training.batch_size must be positive");
  }
}

std::vector<ObjectiveSpec> parse_objectives(const json& j, const std::filesystem::path& base) {
  if (j.is_object()) {
    check_keys(j, "objectives", {"suite"});
    const auto suite = get_string(j, "suite", "objectives");
    return as_config([&] { return builtin_suite(suite); });
  }
  if (!j.is_array() || j.empty()) {
    throw ConfigError("objectives must be {\"suite\": ...} or a nonempty array");
  }
  std::vector<ObjectiveSpec> specs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& o = j[i];
    const std::string w = "objectives[" + std::to_string(i) + "]";
    check_keys(o, w, {"name", "sense", "builtin", "command", "column", "coefficient"});
    ObjectiveSpec spec;
    spec.name = o.contains("name") ? get_string(o, "name", w) : "f" + std::to_string(i);
    if (o.contains("sense")) {
      const auto s = get_string(o, "sense", w);
      spec.sense = as_config([&] { return sense_from_string(s); });
    }
    const bool builtin = o.contains("builtin");
    const bool external = o.contains("command");
    if (builtin == external) throw ConfigError(w + " needs exactly one of builtin or command");
    if (builtin) {
      if (o.contains("column")) throw ConfigError(w + ".column applies to commands only");
      const auto name = get_string(o, "builtin", w);
      const auto known = builtin_functions();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError(w + ": unknown builtin '" + name + "'");
      }
      spec.source = BuiltinSource{name};
    } else {
      ExternalSource src;
      src.command = get_string(o, "command", w);
      // Commands run in the configuration's directory context.
      if (!base.empty() && base != ".") {
        src.command = "cd '" + base.string() + "' && " + src.command;
      }
      if (o.contains("column")) src.column = get_count(o, "column", w);
      spec.source = src;
    }
    if (o.contains("coefficient")) spec.coefficient = get_real(o, "coefficient", w);
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  try {
    check_keys(root, "configuration",
               {"seed", "output_dir", "dataset", "objectives", "loop", "model", "training",
                "evaluator", "metrics", "ablate_top"});
    RunConfig cfg;
    if (root.contains("seed")) cfg.engine.loop.seed = get_count(root, "seed", "configuration");
    if (root.contains("output_dir")) {
      cfg.output_dir = resolve(base_dir, get_string(root, "output_dir", "configuration"));
    }
    if (!root.contains("dataset")) throw ConfigError("configuration needs a dataset");
    const auto& ds = root["dataset"];
    check_keys(ds, "dataset", {"path", "generate"});
    if (ds.contains("path") == ds.contains("generate")) {
      throw ConfigError("dataset needs exactly one of path or generate");
    }
    if (ds.contains("path")) {
      cfg.dataset_path = resolve(base_dir, get_string(ds, "path", "dataset"));
    } else {
      const auto& g = ds["generate"];
      const std::string w = "dataset.generate";
      check_keys(g, w, {"n", "dim", "low", "high", "seed"});
      GeneratedData gen;
      gen.n = get_count(g, "n", w);
      gen.dim = get_count(g, "dim", w);
      maybe_real(g, "low", w, gen.low);
      maybe_real(g, "high", w, gen.high);
      gen.seed = g.contains("seed") ? get_count(g, "seed", w) : cfg.engine.loop.seed;
      if (gen.n == 0 || gen.dim == 0) throw ConfigError(w + ": n and dim must be positive");
      if (!(gen.low < gen.high)) throw ConfigError(w + ": low must be below high");
      cfg.generated = gen;
    }
    if (!root.contains("objectives")) throw ConfigError("configuration needs objectives");
    cfg.objectives = parse_objectives(root["objectives"], base_dir);
    if (root.contains("loop")) parse_loop(root["loop"], cfg.engine.loop);
    if (root.contains("model")) parse_model(root["model"], cfg.engine.model);
    if (root.contains("training")) parse_training(root["training"], cfg.engine.training);
    if (root.contains("evaluator")) {
      const auto& e = root["evaluator"];
      check_keys(e, "evaluator", {"timeout_seconds", "processes"});
      if (e.contains("timeout_seconds")) {
        const double s = get_real(e, "timeout_seconds", "evaluator");
        if (!(s > 0.0)) throw ConfigError("evaluator.timeout_seconds must be positive");
        cfg.engine.evaluator.timeout =
            std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(s * 1000.0)));
      }
      maybe_count(e, "processes", "evaluator", cfg.engine.evaluator.processes);
      if (cfg.engine.evaluator.processes == 0) {
        throw ConfigError("evaluator.processes must be positive");
      }
    }
    cfg.engine.evaluator.timeout = evaluator_timeout_from_env(cfg.engine.evaluator.timeout);
    if (root.contains("metrics")) {
      const auto& m = root["metrics"];
      check_keys(m, "metrics", {"diversity"});
      if (m.contains("diversity")) {
        const auto s = get_string(m, "diversity", "metrics");
        cfg.engine.loop.diversity_metric =
            as_config([&] { return diversity_metric_from_string(s); });
      }
    }
    if (root.contains("ablate_top")) {
      const double f = get_real(root, "ablate_top", "configuration");
      if (!(f > 0.0 && f < 1.0)) throw ConfigError("ablate_top must lie in (0, 1)");
      cfg.ablate_top = f;
    }
    as_config([&] {
      cfg.engine.loop.validate();
      return 0;
    });
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_run_config(text, base);
}

Dataset load_initial_data(const RunConfig& config) {
  Dataset d0;
  if (config.dataset_path) {
    d0 = read_dataset(*config.dataset_path);
    if (!d0.objectives.empty() && d0.objectives.front().size() != config.objectives.size()) {
      throw ConfigError("dataset has " + std::to_string(d0.objectives.front().size()) +
                        " objective columns but " + std::to_string(config.objectives.size()) +
                        " objectives are configured");
    }
  } else if (config.generated) {
    const auto& g = *config.generated;
    Rng rng(g.seed);
    d0.points = sample_uniform_design(g.n, g.dim, g.low, g.high, rng);
  } else {
    throw ConfigError("configuration has no dataset");
  }
  if (config.ablate_top) {
    if (d0.objectives.empty()) {
      d0.objectives = evaluate_batch(config.objectives, d0.points, config.engine.evaluator);
    }
    const auto result =
        ablate_top(orient_all(d0.objectives, config.objectives), *config.ablate_top);
    Dataset kept;
    for (std::size_t i : result.kept) {
      kept.points.push_back(d0.points[i]);
      kept.objectives.push_back(d0.objectives[i]);
    }
    d0 = std::move(kept);
  }
  return d0;
}

}  // namespace molso
