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

#include "molso/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <future>
#include <map>
#include <numbers>
#include <random>

#include "molso/error.hpp"
#include "molso/evaluator.hpp"

namespace molso {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double zdt1_g(std::span<const double> x) {
  if (x.size() < 2) return 1.0;
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += clamp01(x[i]);
  return 1.0 + 9.0 * s / static_cast<double>(x.size() - 1);
}

}  // namespace

std::string to_string(Sense sense) { return sense == Sense::maximize ? "maximize" : "minimize"; }

Sense sense_from_string(const std::string& name) {
  if (name == "max" || name == "maximize") return Sense::maximize;
  if (name == "min" || name == "minimize") return Sense::minimize;
  throw ParameterError("unknown objective sense '" + name + "'");
}

std::vector<std::string> builtin_functions() {
  return {"sphere", "zdt1-f1", "zdt1-f2", "linear", "ripple"};
}

double evaluate_builtin(const std::string& function, std::span<const double> x) {
  if (x.empty()) throw DimensionError("builtin objectives need a nonempty point");
  if (function == "sphere") {
    double s = 0.0;
    for (double v : x) s += v * v;
    return -s;
  }
  if (function == "zdt1-f1") return clamp01(x[0]);
  if (function == "zdt1-f2") {
    const double g = zdt1_g(x);
    return g * (1.0 - std::sqrt(clamp01(x[0]) / g));
  }
  if (function == "linear") {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  if (function == "ripple") {
    double s = 0.0;
    for (double v : x) {
      const double r = std::sin(std::numbers::pi * v);
      s += r * r;
    }
    return s;
  }
  throw ParameterError("unknown builtin objective '" + function + "'");
}

std::vector<std::string> builtin_suites() { return {"sphere-max", "zdt1-pair", "linear-ripple"}; }

std::vector<ObjectiveSpec> builtin_suite(const std::string& suite) {
  auto spec = [](std::string name, Sense sense, std::string fn) {
    return ObjectiveSpec{std::move(name), sense, BuiltinSource{std::move(fn)}, std::nullopt};
  };
  if (suite == "sphere-max") return {spec("sphere", Sense::maximize, "sphere")};
  if (suite == "zdt1-pair") {
    return {spec("zdt1-f1", Sense::minimize, "zdt1-f1"),
            spec("zdt1-f2", Sense::minimize, "zdt1-f2")};
  }
  if (suite == "linear-ripple") {
    return {spec("linear", Sense::maximize, "linear"), spec("ripple", Sense::minimize, "ripple")};
  }
  throw ParameterError("unknown builtin suite '" + suite + "'");
}

std::vector<Point> sample_uniform_design(std::size_t n, std::size_t dim, double low, double high,
                                         Rng& rng) {
  if (dim == 0 || !(high > low)) throw ParameterError("invalid design box");
  std::uniform_real_distribution<double> u(low, high);
  std::vector<Point> out(n, Point(dim));
  for (auto& p : out) {
    for (auto& v : p) v = u(rng);
  }
  return out;
}

std::chrono::milliseconds evaluator_timeout_from_env(std::chrono::milliseconds fallback) {
  const char* raw = std::getenv("MOLSO_EVALUATOR_TIMEOUT");
  if (!raw || !*raw) return fallback;
  char* end = nullptr;
  const double seconds = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(seconds > 0.0)) {
    throw ConfigError(std::string("MOLSO_EVALUATOR_TIMEOUT must be a positive number, got '") +
                      raw + "'");
  }
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

std::vector<ObjectiveVector> evaluate_batch(std::span<const ObjectiveSpec> specs,
                                            std::span<const Point> points,
                                            const EvaluatorOptions& options) {
  if (specs.empty()) throw EmptyInputError("no objectives configured");
  const std::size_t K = specs.size();
  std::vector<ObjectiveVector> out(points.size(), ObjectiveVector(K));
  if (points.empty()) return out;
  const std::size_t dim = points.front().size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw DimensionError("point " + std::to_string(i) + " differs in dimension");
    }
  }

  // External objectives, one evaluator batch per distinct command.
  std::map<std::string, std::vector<std::size_t>> by_command;
  for (std::size_t k = 0; k < K; ++k) {
    if (const auto* ext = std::get_if<ExternalSource>(&specs[k].source)) {
      by_command[ext->command].push_back(k);
    }
  }
  for (const auto& [command, members] : by_command) {
    std::size_t width = 0;
    for (std::size_t k : members) {
      width = std::max(width, std::get<ExternalSource>(specs[k].source).column + 1);
    }
    const std::size_t procs = std::clamp<std::size_t>(options.processes, 1, points.size());
    std::vector<std::vector<double>> scores;
    if (procs == 1) {
      scores = run_external_evaluator(command, points, width, options.timeout);
    } else {
      const std::size_t chunk = (points.size() + procs - 1) / procs;
      std::vector<std::future<std::vector<std::vector<double>>>> jobs;
      for (std::size_t begin = 0; begin < points.size(); begin += chunk) {
        const std::size_t len = std::min(chunk, points.size() - begin);
        jobs.push_back(std::async(std::launch::async, [&, begin, len, cmd = command] {
          return run_external_evaluator(cmd, points.subspan(begin, len), width, options.timeout,
                                        begin);
        }));
      }
      // Collect every job before rethrowing so no evaluator outlives the call;
      // chunks are in index order, so the first failure has the lowest index.
      std::exception_ptr failure;
      for (auto& job : jobs) {
        try {
          auto part = job.get();
          for (auto& s : part) scores.push_back(std::move(s));
        } catch (...) {
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    }
    for (std::size_t k : members) {
      const std::size_t column = std::get<ExternalSource>(specs[k].source).column;
      for (std::size_t i = 0; i < points.size(); ++i) out[i][k] = scores[i][column];
    }
  }

  for (std::size_t k = 0; k < K; ++k) {
    const auto* builtin = std::get_if<BuiltinSource>(&specs[k].source);
    if (!builtin) continue;
    for (std::size_t i = 0; i < points.size(); ++i) {
      out[i][k] = evaluate_builtin(builtin->function, points[i]);
    }
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      if (!std::isfinite(out[i][k])) {
        throw EvaluationError("objective '" + specs[k].name + "' is not finite", i);
      }
    }
  }
  return out;
}

ObjectiveVector orient(std::span<const double> raw, std::span<const ObjectiveSpec> specs) {
  if (raw.size() != specs.size()) {
    throw DimensionError("orient: " + std::to_string(raw.size()) + " scores for " +
                         std::to_string(specs.size()) + " objectives");
  }
  ObjectiveVector out(raw.begin(), raw.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (specs[k].sense == Sense::minimize) out[k] = -out[k];
  }
  return out;
}

std::vector<ObjectiveVector> orient_all(std::span<const ObjectiveVector> raw,
                                        std::span<const ObjectiveSpec> specs) {
  std::vector<ObjectiveVector> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(orient(r, specs));
  return out;
}

StandardizationStats StandardizationStats::from_scores(std::span<const ObjectiveVector> raw) {
  if (raw.empty()) throw EmptyInputError("standardization needs at least one score vector");
  const std::size_t K = raw.front().size();
  StandardizationStats stats{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
  for (const auto& r : raw) {
    if (r.size() != K) throw DimensionError("score vectors differ in length");
    for (std::size_t k = 0; k < K; ++k) stats.mean[k] += r[k];
  }
  const auto n = static_cast<double>(raw.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& r : raw) {
    for (std::size_t k = 0; k < K; ++k) {
      const double d = r[k] - stats.mean[k];
      stats.stddev[k] += d * d;
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    stats.stddev[k] = std::sqrt(stats.stddev[k] / n);
    if (!(stats.stddev[k] > 0.0)) {
      throw ParameterError("objective " + std::to_string(k) +
                           " has zero spread on the initial dataset");
    }
  }
  return stats;
}

double scalarize(std::span<const double> raw, std::span<const ObjectiveSpec> specs,
                 const StandardizationStats& stats) {
  if (raw.size() != specs.size() || stats.mean.size() != specs.size() ||
      stats.stddev.size() != specs.size()) {
    throw DimensionError("scalarize: scores, specs and stats disagree in length");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (!(stats.stddev[k] > 0.0)) throw ParameterError("standard deviation must be positive");
    const double c = specs[k].coefficient.value_or(specs[k].sense == Sense::maximize ? 1.0 : -1.0);
    s += c * (raw[k] - stats.mean[k]) / stats.stddev[k];
  }
  return s;
}

}  // namespace molso
