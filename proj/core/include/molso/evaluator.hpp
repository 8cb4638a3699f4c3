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

#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "molso/types.hpp"

namespace molso {

/// Runs `command` through /bin/sh and exchanges one JSON object per line:
///
///   request  (engine -> child stdin):  {"id": <int>, "x": [<d reals>]}
///   response (child stdout -> engine): {"id": <int>, "f": [<K reals>]}
///
/// Responses may arrive in any order. Standard input is closed after the last
/// request. Every id must be answered exactly once and every score vector
/// must hold `width` finite numbers. The child must exit with status 0 within
/// `timeout`. Violations throw EvaluationError (ProtocolError for protocol
/// violations) naming the lowest unanswered point when there is one.
///
/// `first_id` offsets the ids on the wire and in error messages, so a batch
/// split across several processes still reports batch-global indices.
std::vector<std::vector<double>> run_external_evaluator(const std::string& command,
                                                        std::span<const Point> points,
                                                        std::size_t width,
                                                        std::chrono::milliseconds timeout,
                                                        std::size_t first_id = 0);

}  // namespace molso
