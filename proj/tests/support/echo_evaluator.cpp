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

// Test evaluator speaking the line protocol: answers every request with its
// own input vector. Requests are buffered and answered in reverse order once
// input ends, which exercises out-of-order handling.
//
//   echo_evaluator [--crash-at ID] [--in-order]
//
// With --crash-at the process exits with status 3 upon reading request ID,
// before answering anything else.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::optional<long long> crash_at;
  bool in_order = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--crash-at") == 0 && i + 1 < argc) {
      crash_at = std::atoll(argv[++i]);
    } else if (std::strcmp(argv[i], "--in-order") == 0) {
      in_order = true;
    } else {
      std::cerr << "echo_evaluator: unknown argument " << argv[i] << '\n';
      return 2;
    }
  }

  std::vector<nlohmann::json> pending;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    const auto request = nlohmann::json::parse(line);
    const auto id = request.at("id").get<long long>();
    if (crash_at && id == *crash_at) return 3;
    nlohmann::json reply = {{"id", id}, {"f", request.at("x")}};
    if (in_order) {
      std::cout << reply.dump() << '\n';
    } else {
      pending.push_back(std::move(reply));
    }
  }
  for (auto it = pending.rbegin(); it != pending.rend(); ++it) std::cout << it->dump() << '\n';
  std::cout.flush();
  return 0;
}
