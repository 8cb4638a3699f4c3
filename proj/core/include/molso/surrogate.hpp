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
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "molso/types.hpp"

namespace molso {

/// Squared-exponential kernel hyperparameters. The kernel is
/// signal_std^2 * exp(-r^2 / (2 lengthscale^2)) on standardized inputs.
struct KernelHyper {
  double lengthscale = 1.0;
  double signal_std = 1.0;
};

struct GpPrediction {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Zero-mean Gaussian-process regressor over latent vectors.
///
/// Inputs are standardized per dimension with the training-set mean and
/// standard deviation (dimensions with zero spread are left unscaled); the
/// transform stays fixed when fantasy observations are appended. Immutable
/// once built apart from `add_observation`.
class GpSurrogate {
 public:
  /// Fits on the rows of `inputs` (n x m) and `targets` (n). With no
  /// `hyper`, picks the pair with the largest log marginal likelihood from the
  /// 5 x 5 grid lengthscale in {1e-2, ..., 1e2}, signal_std in
  /// {1e-1, 10^-0.5, ..., 1e1}. Throws ParameterError for n < 2 and
  /// NumericalError when the kernel matrix stays indefinite after a diagonal
  /// jitter of 1e-4.
  static GpSurrogate fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                         std::optional<KernelHyper> hyper = std::nullopt,
                         double noise_variance = 1e-6);

  /// The candidate grid searched by `fit` when no hyperparameters are given.
  static std::vector<KernelHyper> hyper_grid();

  GpPrediction predict(std::span<const double> z) const;
  /// Posterior mean and standard deviation at every row of `queries`.
  void predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& mean,
                     Eigen::VectorXd& stddev) const;

  /// Appends (z, y) reusing the current factorization and hyperparameters.
  void add_observation(std::span<const double> z, double y);

  double log_marginal_likelihood() const noexcept { return lml_; }
  const KernelHyper& hyper() const noexcept { return hyper_; }
  /// Noise variance actually used: requested noise plus any jitter.
  double noise_variance() const noexcept { return noise_; }
  double best_target() const { return targets_.maxCoeff(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(targets_.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(shift_.size()); }

  /// Max |(K + noise I) alpha - y| relative to ||y||; a conditioning check.
  double solve_residual() const;

 private:
  GpSurrogate() = default;
  Eigen::MatrixXd standardize(const Eigen::MatrixXd& rows) const;
  Eigen::MatrixXd kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;
  bool factorize(double noise);

  Eigen::MatrixXd inputs_;  // standardized, n x m
  Eigen::VectorXd targets_;
  Eigen::RowVectorXd shift_;
  Eigen::RowVectorXd scale_;
  KernelHyper hyper_;
  double noise_ = 1e-6;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};

/// EI for maximization: (mean - best) Phi(u) + std phi(u), u = (mean - best) / std;
/// max(mean - best, 0) when std == 0.
double expected_improvement(double mean, double stddev, double best);

struct LatentBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  /// Per dimension [min - margin * range, max + margin * range] of the rows
  /// of `latents`; a dimension with zero range gets +-0.5 around its value.
  static LatentBounds from_training(const Eigen::MatrixXd& latents, double margin = 0.5);
};

struct ProposalOptions {
  std::size_t random_starts = 1024;
  std::size_t refine_steps = 50;
};

/// Sequential greedy batch: each pick maximizes EI by random multistart plus
/// coordinate ascent, then the model is given a constant-liar observation
/// (target = current best) at the pick. The caller's model is not modified.
///
/// Starts are drawn uniformly within `bounds` unless `start_pool` is given,
/// in which case every pick restarts from the pool (clamped to the bounds).
std::vector<Point> propose_batch(const GpSurrogate& model, const LatentBounds& bounds,
                                 std::size_t q, Rng& rng, const ProposalOptions& options = {},
                                 std::span<const Point> start_pool = {});

}  // namespace molso
