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

#include "molso/serialization.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "molso/error.hpp"

namespace molso {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kCheckpointFormat = "molso-model-checkpoint";
constexpr const char* kStateFormat = "molso-loop-state";
constexpr int kVersion = 1;

json to_json(const Checkpoint& c) {
  json params = json::object();
  for (const auto& [name, array] : c.parameters) {
    params[name] = {{"shape", array.shape}, {"values", array.values}};
  }
  json settings = json::object();
  for (const auto& [name, value] : c.settings) settings[name] = value;
  json meta = {{"epochs_seen", c.meta.epochs_seen},
               {"last_loss", c.meta.last_loss ? json(*c.meta.last_loss) : json(nullptr)},
               {"seed", c.meta.seed}};
  return {{"format", kCheckpointFormat},
          {"version", kVersion},
          {"model_kind", to_string(c.kind)},
          {"data_dim", c.data_dim},
          {"latent_dim", c.latent_dim},
          {"settings", settings},
          {"parameters", params},
          {"train_meta", meta}};
}

Checkpoint checkpoint_from(const json& j) {
  Checkpoint c;
  c.kind = model_kind_from_string(j.at("model_kind").get<std::string>());
  c.data_dim = j.at("data_dim").get<std::size_t>();
  c.latent_dim = j.at("latent_dim").get<std::size_t>();
  for (const auto& [name, value] : j.at("settings").items()) c.settings[name] = value.get<double>();
  for (const auto& [name, value] : j.at("parameters").items()) {
    ParameterArray array;
    array.shape = value.at("shape").get<std::vector<std::size_t>>();
    array.values = value.at("values").get<std::vector<double>>();
    std::size_t expected = 1;
    for (auto s : array.shape) expected *= s;
    if (expected != array.values.size()) {
      throw ParseError("parameter '" + name + "' does not match its shape", 0);
    }
    c.parameters.emplace(name, std::move(array));
  }
  const auto& meta = j.at("train_meta");
  c.meta.epochs_seen = meta.at("epochs_seen").get<std::size_t>();
  if (!meta.at("last_loss").is_null()) c.meta.last_loss = meta.at("last_loss").get<double>();
  c.meta.seed = meta.at("seed").get<std::uint64_t>();
  return c;
}

json to_json(const IterationMetrics& m) {
  return {{"mean", m.mean},
          {"top10_mean", m.top10_mean},
          {"std", m.stddev},
          {"diversity", m.diversity},
          {"sample_size", m.sample_size}};
}

json to_json(const IterationRecord& r) {
  json j = {{"iteration", r.iteration}};
  const json metrics = to_json(r.metrics);
  for (auto& [k, v] : metrics.items()) j[k] = v;
  j["d_new_size"] = r.d_new_size;
  j["d_train_size"] = r.d_train_size;
  j["weighted_loss"] = r.weighted_loss;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

IterationRecord record_from(const json& j) {
  IterationRecord r;
  r.iteration = j.at("iteration").get<std::size_t>();
  r.metrics.mean = j.at("mean").get<std::vector<double>>();
  r.metrics.top10_mean = j.at("top10_mean").get<std::vector<double>>();
  r.metrics.stddev = j.at("std").get<std::vector<double>>();
  r.metrics.diversity = j.at("diversity").get<double>();
  r.metrics.sample_size = j.at("sample_size").get<std::size_t>();
  r.d_new_size = j.at("d_new_size").get<std::size_t>();
  r.d_train_size = j.at("d_train_size").get<std::size_t>();
  r.weighted_loss = j.at("weighted_loss").get<double>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what(), 0);
  }
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  return to_json(checkpoint).dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    const auto format = j.at("format").get<std::string>();
    if (format == kStateFormat) return checkpoint_from(j.at("model"));
    if (format != kCheckpointFormat)
      throw ParseError("unknown document format '" + format + "'", 0);
    return checkpoint_from(j);
  });
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_file(path));
}

std::string state_to_json(const LoopState& s) {
  if (!s.model) throw ParameterError("loop state has no model");
  json d_new = json::array();
  for (const auto& c : s.d_new) {
    d_new.push_back({{"x", c.x}, {"raw", c.raw}, {"iteration", c.iteration}});
  }
  json log = json::array();
  for (const auto& r : s.log) log.push_back(to_json(r));
  json j = {{"format", kStateFormat},
            {"version", kVersion},
            {"iteration", s.iteration},
            {"seed", s.seed},
            {"stats", {{"mean", s.stats.mean}, {"stddev", s.stats.stddev}}},
            {"thresholds", s.thresholds},
            {"d0_subset", s.d0_subset},
            {"d_new", d_new},
            {"log", log},
            {"model", to_json(s.model->checkpoint())},
            {"d0", s.d0},
            {"d0_raw", s.d0_raw}};
  return j.dump() + "\n";
}

LoopState state_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    if (j.at("format").get<std::string>() != kStateFormat) {
      throw ParseError("not a loop-state document", 0);
    }
    LoopState s;
    s.iteration = j.at("iteration").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.stats.mean = j.at("stats").at("mean").get<std::vector<double>>();
    s.stats.stddev = j.at("stats").at("stddev").get<std::vector<double>>();
    s.thresholds = j.at("thresholds").get<std::vector<double>>();
    s.d0_subset = j.at("d0_subset").get<std::vector<std::size_t>>();
    for (const auto& c : j.at("d_new")) {
      s.d_new.push_back({c.at("x").get<Point>(), c.at("raw").get<ObjectiveVector>(),
                         c.at("iteration").get<std::size_t>()});
    }
    for (const auto& r : j.at("log")) s.log.push_back(record_from(r));
    s.model = restore_model(checkpoint_from(j.at("model")));
    s.d0 = j.at("d0").get<std::vector<Point>>();
    s.d0_raw = j.at("d0_raw").get<std::vector<ObjectiveVector>>();
    for (std::size_t i : s.d0_subset) {
      if (i >= s.d0.size()) throw ParseError("d0_subset index out of range", 0);
    }
    return s;
  });
}

std::string log_line(const IterationRecord& record) { return to_json(record).dump(); }

IterationRecord log_record_from_json(const std::string& line) {
  const json j = parse(line);
  return guarded([&] { return record_from(j); });
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  const int fd = ::open(tmp.c_str(), O_RDONLY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace molso
