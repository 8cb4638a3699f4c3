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

#include <cstdint>
#include <random>
#include <vector>

namespace molso {

/// A design point in feature space.
using Point = std::vector<double>;

/// Objective scores of one point. Oriented vectors are "larger is better" in
/// every entry; raw vectors follow each objective's own sense.
using ObjectiveVector = std::vector<double>;

/// The engine used for every random stream. Its textual state is what
/// checkpoints persist.
using Rng = std::mt19937_64;

}  // namespace molso
