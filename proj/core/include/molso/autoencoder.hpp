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

#include <Eigen/Dense>
#include <vector>

#include "molso/genmodel.hpp"

namespace molso {

/// Small variational autoencoder trained on a weighted ELBO.
///
/// Encoder d -> hidden -> (mu, log-variance) in R^m, decoder m -> hidden -> d,
/// with the configured activation on both hidden layers. Per example the loss
/// is ||x - decode(z)||^2 / (2 sigma_dec^2) + beta * KL(q(z|x) || N(0, I)),
/// z = mu + exp(logvar / 2) * eps, and the dataset loss is the sum of the
/// example losses weighted by the normalized sample weights. Training is plain
/// minibatch SGD.
class MiniAutoencoder final : public GenerativeModel {
 public:
  MiniAutoencoder(const ModelConfig& config, std::size_t dim);
  explicit MiniAutoencoder(const Checkpoint& checkpoint);

  ModelKind kind() const noexcept override { return ModelKind::mini_autoencoder; }
  std::size_t data_dim() const noexcept override { return dim_; }
  std::size_t latent_dim() const noexcept override { return latent_; }

  FitReport fit_weighted(const WeightedDataset& dataset, const TrainingConfig& config,
                         Rng& rng) override;
  Point encode(std::span<const double> x) const override;
  Point decode(std::span<const double> z) const override;
  std::vector<Point> sample_latent(std::size_t n, Rng& rng) const override;
  Checkpoint checkpoint() const override;
  std::unique_ptr<GenerativeModel> clone() const override;

  std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(theta_.size()); }
  const Eigen::VectorXd& parameters() const noexcept { return theta_; }
  void set_parameters(const Eigen::VectorXd& theta);

  /// Weighted loss sum_i p_i l_i with the reparameterization noise fixed to
  /// the columns of `noise` (m x n). When `gradient` is non-null it receives
  /// the analytic gradient with respect to parameters().
  double weighted_loss(const std::vector<Point>& points, std::span<const double> weights,
                       const Eigen::MatrixXd& noise, Eigen::VectorXd* gradient) const;

 private:
  double example_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& eps, double scale,
                      Eigen::VectorXd* gradient) const;
  void check_dim(std::size_t got, std::size_t want, const char* what) const;

  std::size_t dim_;
  std::size_t latent_;
  std::size_t hidden_;
  double beta_;
  double sigma_dec_;
  Activation activation_;
  Eigen::VectorXd theta_;
};

/// Compares analytic gradients of the weighted loss against central finite
/// differences on `count` randomly chosen parameters (all of them if the
/// model has fewer). Relative error is |a - n| / max(|a|, |n|, 1e-6); the
/// maximum over the checked parameters is returned.
double gradient_check(const MiniAutoencoder& model, const WeightedDataset& dataset, Rng& rng,
                      std::size_t count = 128, double step = 1e-5);

}  // namespace molso
