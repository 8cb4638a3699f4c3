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

#include "molso/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "molso/error.hpp"
#include "molso/serialization.hpp"

namespace molso {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_real(std::string_view cell, std::size_t line) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("'" + std::string(cell) + "' is not a number", line);
  }
  return value;
}

// Matches `<prefix><index>` exactly.
bool is_indexed(std::string_view name, char prefix, std::size_t index) {
  return name == prefix + std::to_string(index);
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw ParseError("no column named '" + std::string(name) + "'", 1);
}

Table parse_table(std::string_view text) {
  Table table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) throw ParseError("empty column name", line_no);
        table.header.emplace_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_real(c, line_no));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("input is empty", 0);
  return table;
}

Table read_table(const std::filesystem::path& path) { return parse_table(read_file(path)); }

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

std::string format_table(const Table& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out += ',';
    out += table.header[j];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_real(row[j]);
    }
    out += '\n';
  }
  return out;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  write_file_atomic(path, format_table(table));
}

Dataset dataset_from_table(const Table& table, bool allow_extra_columns) {
  std::size_t d = 0;
  while (d < table.header.size() && is_indexed(table.header[d], 'x', d)) ++d;
  std::size_t k = 0;
  while (d + k < table.header.size() && is_indexed(table.header[d + k], 'f', k)) ++k;
  if (d == 0) throw ParseError("header must start with x0", 1);
  if (!allow_extra_columns && d + k != table.header.size()) {
    throw ParseError("unexpected column '" + table.header[d + k] + "'", 1);
  }
  if (table.rows.empty()) throw ParseError("dataset has no rows", 0);
  Dataset ds;
  ds.points.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ds.points.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(d));
    if (k > 0) {
      ds.objectives.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(d),
                                 row.begin() + static_cast<std::ptrdiff_t>(d + k));
    }
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path, bool allow_extra_columns) {
  return dataset_from_table(read_table(path), allow_extra_columns);
}

Table dataset_to_table(const Dataset& dataset) {
  Table table;
  const std::size_t d = dataset.dim();
  const std::size_t k = dataset.objectives.empty() ? 0 : dataset.objectives.front().size();
  if (!dataset.objectives.empty() && dataset.objectives.size() != dataset.points.size()) {
    throw DimensionError("dataset has " + std::to_string(dataset.points.size()) + " points but " +
                         std::to_string(dataset.objectives.size()) + " score rows");
  }
  for (std::size_t j = 0; j < d; ++j) table.header.push_back("x" + std::to_string(j));
  for (std::size_t j = 0; j < k; ++j) table.header.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    std::vector<double> row = dataset.points[i];
    if (k > 0) row.insert(row.end(), dataset.objectives[i].begin(), dataset.objectives[i].end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace molso
