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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("molso-cli-" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

  Result molso(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + MOLSO_CLI + "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string small_config(const std::string& extra = "") {
  return R"({
    "seed": 5,
    "dataset": {"generate": {"n": 300, "dim": 4, "seed": 5}},
    "objectives": {"suite": "linear-ripple"},
    "loop": {"iterations": 3, "n_random": 60, "top_r": 12, "stats_sample": 100,
             "bo_batch": 6, "gp_max_points": 150},
    "model": {"components": 3})" +
         extra + "}";
}

}  // namespace

TEST_CASE("rank reproduces the hand example") {
  Workspace ws;
  spit(ws / "hand.csv", "x0,f0,f1\n0,3,1\n1,1,3\n2,2,2\n3,1,1\n");
  const auto r = ws.molso("rank --input '" + (ws / "hand.csv").string() + "' --senses max,max");
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "x0,f0,f1,front,rank");
  CHECK(rows[1] == "0,3,1,1,0");
  CHECK(rows[3] == "2,2,2,1,0");
  CHECK(rows[4] == "3,1,1,2,3");
}

TEST_CASE("rank output ranks to itself") {
  Workspace ws;
  const auto gen = ws.molso("generate --n 200 --dim 3 --seed 2 --suite linear-ripple --out '" +
                            (ws / "d.csv").string() + "'");
  REQUIRE(gen.status == 0);
  const auto first =
      ws.molso("rank --input '" + (ws / "d.csv").string() +
               "' --suite linear-ripple --k 0.01 --out '" + (ws / "r1.csv").string() + "'");
  REQUIRE(first.status == 0);
  const auto second =
      ws.molso("rank --input '" + (ws / "r1.csv").string() +
               "' --suite linear-ripple --k 0.01 --out '" + (ws / "r2.csv").string() + "'");
  REQUIRE(second.status == 0);
  CHECK(slurp(ws / "r1.csv") == slurp(ws / "r2.csv"));
  CHECK(lines(slurp(ws / "r1.csv")).front() == "x0,x1,x2,f0,f1,front,rank,weight");
}

TEST_CASE("malformed input exits with status 2 and a line number") {
  Workspace ws;
  spit(ws / "empty.csv", "");
  const auto empty = ws.molso("rank --input '" + (ws / "empty.csv").string() + "'");
  CHECK(empty.status == 2);
  spit(ws / "bad.csv", "x0,f0\n1,2\n3,x\n");
  const auto bad = ws.molso("rank --input '" + (ws / "bad.csv").string() + "' --senses max");
  CHECK(bad.status == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(ws.molso("rank").status == 2);
  CHECK(ws.molso("frobnicate").status == 2);
}

TEST_CASE("generate and sample are seeded and shaped") {
  Workspace ws;
  const auto a = ws.molso("generate --n 20 --dim 3 --seed 9");
  const auto b = ws.molso("generate --n 20 --dim 3 --seed 9");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(lines(a.out).size() == 21);

  spit(ws / "cfg.json", small_config());
  REQUIRE(ws.molso("run --quiet --config '" + (ws / "cfg.json").string() +
                   "' --iterations 1 --out '" + (ws / "run").string() + "'")
              .status == 0);
  const auto ckpt = (ws / "run/checkpoints/model-0001.json").string();
  const auto s1 =
      ws.molso("sample --checkpoint '" + ckpt + "' --n 7 --seed 3 --suite linear-ripple");
  const auto s2 =
      ws.molso("sample --checkpoint '" + ckpt + "' --n 7 --seed 3 --suite linear-ripple");
  REQUIRE(s1.status == 0);
  CHECK(s1.out == s2.out);
  const auto rows = lines(s1.out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == "x0,x1,x2,x3,f0,f1");
  CHECK(ws.molso("sample --checkpoint '" + ckpt + "' --n 0").status == 2);
  CHECK(ws.molso("sample --checkpoint '" + (ws / "missing.json").string() + "' --n 3").status != 0);
}

TEST_CASE("ablate writes the kept rows and an audit of the removed ones") {
  Workspace ws;
  REQUIRE(ws.molso("generate --n 100 --dim 2 --seed 4 --suite linear-ripple --out '" +
                   (ws / "d.csv").string() + "'")
              .status == 0);
  const auto r = ws.molso(
      "ablate --input '" + (ws / "d.csv").string() + "' --frac 0.1 --suite linear-ripple --out '" +
      (ws / "kept.csv").string() + "' --removed '" + (ws / "gone.csv").string() + "'");
  REQUIRE(r.status == 0);
  CHECK(lines(slurp(ws / "kept.csv")).size() == 91);
  CHECK(lines(slurp(ws / "gone.csv")).size() == 11);
  CHECK(ws.molso("ablate --input '" + (ws / "d.csv").string() + "' --frac 0 --suite linear-ripple")
            .status == 2);
}

TEST_CASE("run honours overrides, resumes and maps failures to exit codes") {
  Workspace ws;
  spit(ws / "cfg.json", small_config());
  const auto cfg = (ws / "cfg.json").string();

  const auto bo = ws.molso("run --quiet --config '" + cfg +
                           "' --strategy bo --iterations 1 --out '" + (ws / "bo").string() + "'");
  REQUIRE(bo.status == 0);
  const auto bo_state = nlohmann::json::parse(slurp(ws / "bo/checkpoints/state-0001.json"));
  CHECK(bo_state.at("d_new").size() <= 6);

  REQUIRE(ws.molso("run --config '" + cfg + "' --iterations 2 --out '" + (ws / "r").string() + "'")
              .status == 0);
  const auto resumed =
      ws.molso("run --config '" + cfg + "' --resume --out '" + (ws / "r").string() + "'");
  REQUIRE(resumed.status == 0);
  CHECK(lines(slurp(ws / "r/log.jsonl")).size() == 4);
  CHECK(lines(resumed.err).size() == 1);

  spit(ws / "bad.json", small_config(R"(, "loop": {"k": -1})"));
  CHECK(ws.molso("run --quiet --config '" + (ws / "bad.json").string() + "'").status == 2);

  const std::string crash = std::string(MOLSO_ECHO_EVALUATOR) + " --in-order --crash-at 4";
  spit(ws / "crash.json", R"({"seed": 1, "dataset": {"generate": {"n": 50, "dim": 2}},
    "objectives": [{"name": "a", "sense": "max", "command": ")" +
                              crash + R"(", "column": 0},
                   {"name": "b", "sense": "min", "command": ")" +
                              crash + R"(", "column": 1}],
    "loop": {"iterations": 1, "n_random": 20, "top_r": 5, "stats_sample": 10}})");
  const auto failed = ws.molso("run --quiet --config '" + (ws / "crash.json").string() +
                               "' --out '" + (ws / "crash").string() + "'");
  CHECK(failed.status == 3);
  CHECK(failed.err.find("failing point index: 4") != std::string::npos);

  spit(ws / "diverge.json", small_config(R"(, "model": {"kind": "mini-autoencoder"},
    "training": {"learning_rate": 1e12})"));
  CHECK(ws.molso("run --quiet --config '" + (ws / "diverge.json").string() + "' --out '" +
                 (ws / "div").string() + "'")
            .status == 4);
}

TEST_CASE("the bundled demo completes with eleven log records") {
  Workspace ws;
  const auto r = ws.molso(std::string("run --quiet --config '") + MOLSO_DEMO_CONFIG + "' --out '" +
                          (ws / "demo").string() + "'");
  REQUIRE(r.status == 0);
  CHECK(lines(slurp(ws / "demo/log.jsonl")).size() == 11);
  const auto csv = lines(slurp(ws / "demo/candidates.csv"));
  REQUIRE(!csv.empty());
  CHECK(csv.front().rfind("x0,", 0) == 0);
}
