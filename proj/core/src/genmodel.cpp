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

#include "molso/genmodel.hpp"

#include "molso/autoencoder.hpp"
#include "molso/error.hpp"
#include "molso/gmm.hpp"

namespace molso {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::weighted_gmm:
      return "weighted-gmm";
    case ModelKind::mini_autoencoder:
      return "mini-autoencoder";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "weighted-gmm") return ModelKind::weighted_gmm;
  if (name == "mini-autoencoder") return ModelKind::mini_autoencoder;
  throw ParameterError("unknown model kind '" + name + "'");
}

std::string to_string(WeightingMode mode) {
  return mode == WeightingMode::resample ? "resample" : "loss-multiplier";
}

WeightingMode weighting_mode_from_string(const std::string& name) {
  if (name == "resample") return WeightingMode::resample;
  if (name == "loss-multiplier") return WeightingMode::loss_multiplier;
  throw ParameterError("unknown weighting mode '" + name + "'");
}

std::unique_ptr<GenerativeModel> make_model(const ModelConfig& config, std::size_t data_dim) {
  switch (config.kind) {
    case ModelKind::weighted_gmm:
      return std::make_unique<WeightedGmm>(config, data_dim);
    case ModelKind::mini_autoencoder:
      return std::make_unique<MiniAutoencoder>(config, data_dim);
  }
  throw ParameterError("unknown model kind");
}

std::unique_ptr<GenerativeModel> restore_model(const Checkpoint& checkpoint) {
  switch (checkpoint.kind) {
    case ModelKind::weighted_gmm:
      return std::make_unique<WeightedGmm>(checkpoint);
    case ModelKind::mini_autoencoder:
      return std::make_unique<MiniAutoencoder>(checkpoint);
  }
  throw ParameterError("unknown model kind");
}

std::vector<double> flat_parameters(const Checkpoint& checkpoint) {
  std::vector<double> out;
  for (const auto& [name, array] : checkpoint.parameters) {
    out.insert(out.end(), array.values.begin(), array.values.end());
  }
  return out;
}

}  // namespace molso
