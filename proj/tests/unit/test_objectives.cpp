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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "molso/error.hpp"
#include "molso/evaluator.hpp"
#include "molso/objectives.hpp"
#include "molso/pareto.hpp"

using namespace molso;
using namespace std::chrono_literals;

namespace {

const std::string kEcho = MOLSO_ECHO_EVALUATOR;

ObjectiveSpec external(const std::string& command, std::size_t column,
                       Sense sense = Sense::maximize) {
  return ObjectiveSpec{"ext" + std::to_string(column), sense, ExternalSource{command, column},
                       std::nullopt};
}

std::vector<Point> grid_points(std::size_t n, std::size_t d) {
  std::vector<Point> pts(n, Point(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) pts[i][j] = 0.01 * static_cast<double>(i) + 0.5 * j;
  }
  return pts;
}

}  // namespace

TEST_SUITE("objectives") {
  TEST_CASE("builtin functions at known points") {
    const Point zero(5, 0.0);
    CHECK(evaluate_builtin("sphere", zero) == 0.0);
    CHECK(evaluate_builtin("sphere", Point{1.0, 2.0}) == -5.0);
    CHECK(evaluate_builtin("zdt1-f1", zero) == 0.0);
    CHECK(evaluate_builtin("zdt1-f2", zero) == doctest::Approx(1.0));

    // g = 1 + 9 * mean(x_2..x_d), f2 = g * (1 - sqrt(f1 / g)).
    const Point x{0.25, 0.5, 0.1};
    const double g = 1.0 + 9.0 * (0.5 + 0.1) / 2.0;
    CHECK(evaluate_builtin("zdt1-f2", x) == doctest::Approx(g * (1.0 - std::sqrt(0.25 / g))));
    CHECK(evaluate_builtin("linear", x) == doctest::Approx(0.85));
    const double s = std::sin(std::numbers::pi * 0.25);
    const double t = std::sin(std::numbers::pi * 0.1);
    CHECK(evaluate_builtin("ripple", x) == doctest::Approx(s * s + 1.0 + t * t));
    CHECK_THROWS_AS(evaluate_builtin("nope", x), ParameterError);
  }

  TEST_CASE("suites evaluate in batch") {
    const auto specs = builtin_suite("linear-ripple");
    REQUIRE(specs.size() == 2);
    CHECK(specs[1].sense == Sense::minimize);
    const auto pts = grid_points(5, 3);
    const auto f = evaluate_batch(specs, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(f[i][0] == evaluate_builtin("linear", pts[i]));
      CHECK(f[i][1] == evaluate_builtin("ripple", pts[i]));
    }
    CHECK_THROWS_AS(builtin_suite("unknown"), ParameterError);
  }

  TEST_CASE("orientation flips minimized objectives") {
    std::vector<ObjectiveSpec> specs = builtin_suite("linear-ripple");
    CHECK(orient(ObjectiveVector{3, 2}, specs) == ObjectiveVector{3, -2});
    specs[1].sense = Sense::maximize;
    CHECK(orient(ObjectiveVector{3, 2}, specs) == ObjectiveVector{3, 2});
    specs[1].sense = Sense::minimize;
    const ObjectiveVector raw{1.5, -0.25};
    CHECK(orient(orient(raw, specs), specs) == raw);
    CHECK(sense_from_string("min") == Sense::minimize);
    CHECK(sense_from_string("maximize") == Sense::maximize);
  }

  TEST_CASE("dominance after orientation does not depend on the labeling") {
    const auto specs = builtin_suite("linear-ripple");
    auto flipped = specs;
    for (auto& s : flipped)
      s.sense = s.sense == Sense::maximize ? Sense::minimize : Sense::maximize;
    Rng rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 200; ++t) {
      const ObjectiveVector a{u(rng), u(rng)}, b{u(rng), u(rng)};
      const ObjectiveVector na{-a[0], -a[1]}, nb{-b[0], -b[1]};
      CHECK(dominates(orient(a, specs), orient(b, specs)) ==
            dominates(orient(na, flipped), orient(nb, flipped)));
    }
  }

  TEST_CASE("scalarization") {
    const auto specs = builtin_suite("linear-ripple");
    const std::vector<ObjectiveVector> d0{{1, 4}, {3, 0}, {2, 2}, {6, 2}};
    const auto stats = StandardizationStats::from_scores(d0);
    CHECK(stats.mean == std::vector<double>{3, 2});
    CHECK(scalarize(stats.mean, specs, stats) == 0.0);
    const ObjectiveVector above{stats.mean[0] + stats.stddev[0], stats.mean[1] + stats.stddev[1]};
    CHECK(scalarize(above, specs, stats) == doctest::Approx(0.0));

    // Independent recomputation with population moments.
    Rng rng(6);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 100; ++t) {
      const ObjectiveVector r{u(rng), u(rng)};
      double expect = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        double m = 0.0, v = 0.0;
        for (const auto& row : d0) m += row[k] / 4.0;
        for (const auto& row : d0) v += (row[k] - m) * (row[k] - m) / 4.0;
        expect += (k == 0 ? 1.0 : -1.0) * (r[k] - m) / std::sqrt(v);
      }
      CHECK(scalarize(r, specs, stats) == doctest::Approx(expect).epsilon(1e-12));
    }

    auto weighted = specs;
    weighted[0].coefficient = 0.5;
    CHECK(scalarize(ObjectiveVector{5, 2}, weighted, stats) ==
          doctest::Approx(0.5 * 2.0 / stats.stddev[0]));

    CHECK_THROWS_AS(StandardizationStats::from_scores(std::vector<ObjectiveVector>{{1, 2}, {1, 3}}),
                    ParameterError);
  }

  TEST_CASE("shifting one raw objective keeps the argmax") {
    const auto specs = builtin_suite("linear-ripple");
    Rng rng(8);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<ObjectiveVector> cands(50, ObjectiveVector(2));
    for (auto& c : cands) c = {u(rng), u(rng)};
    const auto stats = StandardizationStats::from_scores(cands);
    auto argmax = [&](double shift) {
      std::size_t best = 0;
      double best_s = -1e300;
      for (std::size_t i = 0; i < cands.size(); ++i) {
        const double s = scalarize(ObjectiveVector{cands[i][0], cands[i][1] + shift}, specs, stats);
        if (s > best_s) best_s = s, best = i;
      }
      return best;
    };
    CHECK(argmax(0.0) == argmax(7.5));
  }

  TEST_CASE("external evaluator round trip") {
    const auto pts = grid_points(40, 3);
    const std::vector<ObjectiveSpec> specs{external(kEcho, 0), external(kEcho, 2, Sense::minimize)};
    EvaluatorOptions opts;
    opts.timeout = 20s;
    for (std::size_t processes : {1u, 3u}) {
      opts.processes = processes;
      const auto f = evaluate_batch(specs, pts, opts);
      REQUIRE(f.size() == pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(f[i][0] == pts[i][0]);
        CHECK(f[i][1] == pts[i][2]);
      }
    }
    const auto mixed =
        evaluate_batch(std::vector<ObjectiveSpec>{builtin_suite("sphere-max")[0],
                                                  external(kEcho + " --in-order", 1)},
                       pts, opts);
    CHECK(mixed[3][0] == evaluate_builtin("sphere", pts[3]));
    CHECK(mixed[3][1] == pts[3][1]);
  }

  TEST_CASE("evaluator failures name the failing point") {
    const auto pts = grid_points(30, 2);
    const std::vector<ObjectiveSpec> crash{external(kEcho + " --in-order --crash-at 17", 0)};
    try {
      evaluate_batch(crash, pts, EvaluatorOptions{20s, 1});
      FAIL("expected an evaluation error");
    } catch (const EvaluationError& e) {
      REQUIRE(e.point_index().has_value());
      CHECK(*e.point_index() == 17);
    }
  }

  TEST_CASE("protocol violations") {
    const auto pts = grid_points(3, 1);
    const std::string dup =
        "cat >/dev/null; printf '{\"id\":0,\"f\":[1]}\\n{\"id\":0,\"f\":[1]}\\n'";
    CHECK_THROWS_AS(run_external_evaluator(dup, pts, 1, 20s), ProtocolError);
    const std::string unknown = "cat >/dev/null; printf '{\"id\":9,\"f\":[1]}\\n'";
    CHECK_THROWS_AS(run_external_evaluator(unknown, pts, 1, 20s), ProtocolError);
    const std::string missing = "cat >/dev/null; printf '{\"id\":1,\"f\":[1]}\\n'";
    try {
      run_external_evaluator(missing, pts, 1, 20s);
      FAIL("expected a protocol error");
    } catch (const ProtocolError& e) {
      CHECK(e.point_index() == std::optional<std::size_t>{0});
    }
    const std::string garbage = "cat >/dev/null; echo not-json";
    CHECK_THROWS_AS(run_external_evaluator(garbage, pts, 1, 20s), ProtocolError);
    const std::string narrow = "cat >/dev/null; printf '{\"id\":0,\"f\":[]}\\n'";
    CHECK_THROWS_AS(run_external_evaluator(narrow, pts, 1, 20s), ProtocolError);
  }

  TEST_CASE("evaluator timeout") {
    const auto pts = grid_points(2, 1);
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(run_external_evaluator("sleep 30", pts, 1, 300ms), EvaluationError);
    CHECK(std::chrono::steady_clock::now() - start < 10s);
  }

  TEST_CASE("uniform design stays in its box") {
    Rng rng(2);
    const auto pts = sample_uniform_design(500, 4, -2.0, 3.0, rng);
    for (const auto& p : pts) {
      for (double v : p) {
        CHECK(v >= -2.0);
        CHECK(v < 3.0);
      }
    }
  }
}
