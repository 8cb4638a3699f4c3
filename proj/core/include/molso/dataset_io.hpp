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
#include <string_view>
#include <vector>

#include "molso/types.hpp"

namespace molso {

/// A rectangular table of reals with named columns.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Position of `name` in the header; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
};

/// Parses comma-separated text with one header row. Blank lines are skipped.
/// Malformed or ragged rows raise ParseError carrying the 1-based line
/// number; an input with no header raises ParseError too.
Table parse_table(std::string_view text);
Table read_table(const std::filesystem::path& path);

/// Shortest round-trip formatting of every value.
std::string format_table(const Table& table);
/// Written atomically.
void write_table(const std::filesystem::path& path, const Table& table);

std::string format_real(double value);

/// Points plus optional raw objective scores.
struct Dataset {
  std::vector<Point> points;
  std::vector<ObjectiveVector> objectives;  ///< empty when the file has no f columns

  std::size_t dim() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

/// Reads a dataset with header `x0..x{d-1}[,f0..f{K-1}]`. With
/// `allow_extra_columns` further trailing columns (front, rank, ...) are
/// ignored; otherwise they are a parse error. At least one data row is
/// required.
Dataset read_dataset(const std::filesystem::path& path, bool allow_extra_columns = false);
Dataset dataset_from_table(const Table& table, bool allow_extra_columns = false);
Table dataset_to_table(const Dataset& dataset);

}  // namespace molso
