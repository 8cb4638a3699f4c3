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

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molso/types.hpp"
#include "molso/weighting.hpp"

namespace molso {

enum class ModelKind { weighted_gmm, mini_autoencoder };
enum class WeightingMode { resample, loss_multiplier };
enum class Activation { tanh, identity };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
std::string to_string(WeightingMode mode);
WeightingMode weighting_mode_from_string(const std::string& name);

/// Architecture and fixed hyperparameters of a reference model.
struct ModelConfig {
  ModelKind kind = ModelKind::weighted_gmm;

  // weighted-gmm
  std::size_t components = 10;
  double covariance_floor = 1e-6;
  std::size_t max_em_iterations = 100;  ///< cap per fit_weighted call
  double em_tolerance = 1e-8;

  // mini-autoencoder
  std::size_t latent_dim = 4;
  std::size_t hidden = 32;
  double beta = 0.1;
  double sigma_dec = 1.0;
  Activation activation = Activation::tanh;
  double init_scale = 0.1;

  std::uint64_t init_seed = 0;
};

struct TrainingConfig {
  double learning_rate = 0.0007;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  WeightingMode weighting_mode = WeightingMode::resample;
  /// Stop after this many optimizer steps (0 = no cap). Used by tests.
  std::size_t max_steps = 0;
};

struct TrainMeta {
  std::size_t epochs_seen = 0;
  std::optional<double> last_loss;
  std::uint64_t seed = 0;
};

struct FitReport {
  double weighted_loss = 0.0;
  std::size_t epochs_run = 0;
  /// Per-epoch objective. For the mixture this is the weighted mean
  /// log-likelihood before the first and after every EM step.
  std::vector<double> history;
};

struct ParameterArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// Serializable snapshot of a model: enough to rebuild it exactly.
struct Checkpoint {
  ModelKind kind = ModelKind::weighted_gmm;
  std::size_t data_dim = 0;
  std::size_t latent_dim = 0;
  std::map<std::string, double> settings;
  std::map<std::string, ParameterArray> parameters;
  TrainMeta meta;
};

/// Latent-variable generative model trained on weighted data.
///
/// Training mutates the model; encode/decode/sample_latent are const and safe
/// to call concurrently on a model nobody is training.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual ModelKind kind() const noexcept = 0;
  virtual std::size_t data_dim() const noexcept = 0;
  virtual std::size_t latent_dim() const noexcept = 0;

  /// Trains using `dataset.weights` as relative sample influence, for
  /// `config.epochs` passes or, for the mixture, until EM converges. Throws
  /// DimensionError on a feature-size mismatch and NumericalError when the
  /// objective becomes non-finite.
  virtual FitReport fit_weighted(const WeightedDataset& dataset, const TrainingConfig& config,
                                 Rng& rng) = 0;

  virtual Point encode(std::span<const double> x) const = 0;
  virtual Point decode(std::span<const double> z) const = 0;
  /// `n` i.i.d. draws from the latent prior. Throws ParameterError for n == 0.
  virtual std::vector<Point> sample_latent(std::size_t n, Rng& rng) const = 0;

  virtual Checkpoint checkpoint() const = 0;
  virtual std::unique_ptr<GenerativeModel> clone() const = 0;

  const TrainMeta& meta() const noexcept { return meta_; }

 protected:
  TrainMeta meta_;
};

std::unique_ptr<GenerativeModel> make_model(const ModelConfig& config, std::size_t data_dim);
std::unique_ptr<GenerativeModel> restore_model(const Checkpoint& checkpoint);

/// All parameters concatenated in name order; used to measure how far a
/// retraining step moved a model.
std::vector<double> flat_parameters(const Checkpoint& checkpoint);

}  // namespace molso
