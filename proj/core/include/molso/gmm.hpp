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

/// Gaussian mixture fitted by weighted EM. Encode and decode are the
/// identity, so the latent space is the feature space itself.
///
/// Every fit_weighted call runs EM from the current parameters until the
/// weighted log-likelihood gains less than `em_tolerance` or
/// `max_em_iterations` steps have run; `TrainingConfig::epochs` does not
/// apply. Each EM step is one pass over the whole dataset. Covariance
/// eigenvalues are clipped from below at `covariance_floor`, which is the
/// constrained maximizer of the M-step, so the weighted log-likelihood never
/// decreases within a call.
class WeightedGmm final : public GenerativeModel {
 public:
  WeightedGmm(const ModelConfig& config, std::size_t dim);
  explicit WeightedGmm(const Checkpoint& checkpoint);

  ModelKind kind() const noexcept override { return ModelKind::weighted_gmm; }
  std::size_t data_dim() const noexcept override { return dim_; }
  std::size_t latent_dim() const noexcept override { return dim_; }

  FitReport fit_weighted(const WeightedDataset& dataset, const TrainingConfig& config,
                         Rng& rng) override;
  Point encode(std::span<const double> x) const override;
  Point decode(std::span<const double> z) const override;
  std::vector<Point> sample_latent(std::size_t n, Rng& rng) const override;
  Checkpoint checkpoint() const override;
  std::unique_ptr<GenerativeModel> clone() const override;

  /// sum_i p_i log sum_c pi_c N(x_i | mu_c, Sigma_c) with p = normalized weights.
  double weighted_log_likelihood(const std::vector<Point>& points,
                                 std::span<const double> weights) const;

  bool initialized() const noexcept { return initialized_; }
  std::size_t components() const noexcept { return components_; }
  const std::vector<double>& mixing() const noexcept { return mixing_; }
  const std::vector<Eigen::VectorXd>& means() const noexcept { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const noexcept { return covs_; }

 private:
  void initialize(const Eigen::MatrixXd& x, std::span<const double> p, Rng& rng);
  Eigen::MatrixXd clip_covariance(const Eigen::MatrixXd& scatter) const;
  void refresh_factors();
  /// n x C matrix of log pi_c + log N(x_i | c).
  Eigen::MatrixXd log_joint(const Eigen::MatrixXd& x) const;
  static double weighted_ll(const Eigen::MatrixXd& joint, const Eigen::VectorXd& p,
                            Eigen::MatrixXd* responsibilities);

  std::size_t dim_;
  std::size_t components_;
  double floor_;
  std::size_t max_iterations_;
  double tolerance_;
  bool initialized_ = false;

  std::vector<double> mixing_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covs_;
  std::vector<Eigen::MatrixXd> chol_;
  std::vector<double> log_det_;
};

}  // namespace molso
