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

#include <filesystem>
#include <string>

#include "molso/genmodel.hpp"
#include "molso/orchestrator.hpp"

namespace molso {

// Checkpoints and loop states are JSON documents. Reals are written in the
// shortest form that parses back to the same double, so a save/load round
// trip is exact.

std::string checkpoint_to_json(const Checkpoint& checkpoint);
/// Accepts a model checkpoint document or a loop-state document (whose
/// embedded model is returned). Throws ParseError on malformed input.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string state_to_json(const LoopState& state);
LoopState state_from_json(const std::string& text);

/// One line of the iteration log, without the trailing newline. Field order:
/// iteration, mean, top10_mean, std, diversity, sample_size, d_new_size,
/// d_train_size, weighted_loss, wall_time_s.
std::string log_line(const IterationRecord& record);
IterationRecord log_record_from_json(const std::string& line);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace molso
