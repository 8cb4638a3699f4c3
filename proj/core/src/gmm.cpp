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

#include "molso/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "molso/error.hpp"

namespace molso {
namespace {

Eigen::MatrixXd to_columns(const std::vector<Point>& points, std::size_t dim) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw DimensionError("point " + std::to_string(i) + " has dimension " +
                           std::to_string(points[i].size()) + ", model expects " +
                           std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = points[i][j];
    }
  }
  return x;
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

WeightedGmm::WeightedGmm(const ModelConfig& config, std::size_t dim)
    : dim_(dim),
      components_(config.components),
      floor_(config.covariance_floor),
      max_iterations_(config.max_em_iterations),
      tolerance_(config.em_tolerance) {
  if (dim_ == 0) throw ParameterError("mixture dimension must be positive");
  if (components_ == 0) throw ParameterError("mixture needs at least one component");
  if (!(floor_ > 0.0)) throw ParameterError("covariance floor must be positive");
  meta_.seed = config.init_seed;
}

WeightedGmm::WeightedGmm(const Checkpoint& ckpt)
    : dim_(ckpt.data_dim),
      components_(static_cast<std::size_t>(ckpt.settings.at("components"))),
      floor_(ckpt.settings.at("covariance_floor")),
      max_iterations_(static_cast<std::size_t>(ckpt.settings.at("max_em_iterations"))),
      tolerance_(ckpt.settings.at("em_tolerance")),
      initialized_(ckpt.settings.at("initialized") != 0.0) {
  if (ckpt.kind != ModelKind::weighted_gmm) throw ParameterError("checkpoint is not a mixture");
  if (ckpt.latent_dim != dim_) throw DimensionError("mixture latent dim must equal data dim");
  meta_ = ckpt.meta;
  if (!initialized_) return;
  const auto& mix = ckpt.parameters.at("mixing");
  const auto& mu = ckpt.parameters.at("means");
  const auto& cov = ckpt.parameters.at("covariances");
  const std::size_t d = dim_;
  const std::size_t c = components_;
  if (mix.values.size() != c || mu.values.size() != c * d || cov.values.size() != c * d * d) {
    throw DimensionError("mixture checkpoint arrays have inconsistent shapes");
  }
  mixing_ = mix.values;
  for (std::size_t k = 0; k < c; ++k) {
    means_.push_back(
        Eigen::Map<const Eigen::VectorXd>(mu.values.data() + k * d, static_cast<Eigen::Index>(d)));
    covs_.push_back(Eigen::Map<const Eigen::MatrixXd>(
        cov.values.data() + k * d * d, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  }
  refresh_factors();
}

Eigen::MatrixXd WeightedGmm::clip_covariance(const Eigen::MatrixXd& scatter) const {
  Eigen::MatrixXd sym = 0.5 * (scatter + scatter.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(floor_);
  Eigen::MatrixXd out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

void WeightedGmm::refresh_factors() {
  chol_.clear();
  log_det_.clear();
  for (const auto& cov : covs_) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("mixture covariance is not positive definite");
    }
    Eigen::MatrixXd l = llt.matrixL();
    chol_.push_back(l);
    log_det_.push_back(2.0 * l.diagonal().array().log().sum());
  }
}

void WeightedGmm::initialize(const Eigen::MatrixXd& x, std::span<const double> p, Rng& rng) {
  const auto n = x.cols();
  const Eigen::VectorXd pw = to_eigen(p);

  // Weighted k-means++ seeding of the means.
  WeightedSampler by_weight(p);
  means_.clear();
  means_.push_back(x.col(static_cast<Eigen::Index>(by_weight(rng))));
  Eigen::VectorXd d2 = (x.colwise() - means_.back()).colwise().squaredNorm().transpose();
  while (means_.size() < components_) {
    std::vector<double> score(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      score[static_cast<std::size_t>(i)] = pw(i) * d2(i);
      total += score[static_cast<std::size_t>(i)];
    }
    const std::size_t pick = total > 0.0 ? WeightedSampler(score)(rng) : by_weight(rng);
    means_.push_back(x.col(static_cast<Eigen::Index>(pick)));
    d2 = d2.cwiseMin((x.colwise() - means_.back()).colwise().squaredNorm().transpose());
  }

  const Eigen::VectorXd mean = x * pw;
  const Eigen::MatrixXd centered = x.colwise() - mean;
  const Eigen::MatrixXd scatter = centered * pw.asDiagonal() * centered.transpose();
  covs_.assign(components_, clip_covariance(scatter));
  mixing_.assign(components_, 1.0 / static_cast<double>(components_));
  refresh_factors();
  initialized_ = true;
}

Eigen::MatrixXd WeightedGmm::log_joint(const Eigen::MatrixXd& x) const {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  Eigen::MatrixXd joint(x.cols(), static_cast<Eigen::Index>(components_));
  for (std::size_t c = 0; c < components_; ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    if (!(mixing_[c] > 0.0)) {
      joint.col(col).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    Eigen::MatrixXd diff = x.colwise() - means_[c];
    chol_[c].triangularView<Eigen::Lower>().solveInPlace(diff);
    joint.col(col) =
        (-0.5 * diff.colwise().squaredNorm().array() +
         (std::log(mixing_[c]) - 0.5 * (static_cast<double>(dim_) * log2pi + log_det_[c])))
            .transpose();
  }
  return joint;
}

double WeightedGmm::weighted_ll(const Eigen::MatrixXd& joint, const Eigen::VectorXd& p,
                                Eigen::MatrixXd* responsibilities) {
  double ll = 0.0;
  if (responsibilities) responsibilities->resize(joint.rows(), joint.cols());
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    const double m = joint.row(i).maxCoeff();
    const double lse = m + std::log((joint.row(i).array() - m).exp().sum());
    if (p(i) > 0.0) ll += p(i) * lse;
    if (responsibilities) responsibilities->row(i) = (joint.row(i).array() - lse).exp();
  }
  return ll;
}

double WeightedGmm::weighted_log_likelihood(const std::vector<Point>& points,
                                            std::span<const double> weights) const {
  if (!initialized_) throw ParameterError("mixture has not been fitted");
  const auto p = sampling_distribution(weights);
  if (p.size() != points.size()) throw DimensionError("weights and points are misaligned");
  return weighted_ll(log_joint(to_columns(points, dim_)), to_eigen(p), nullptr);
}

FitReport WeightedGmm::fit_weighted(const WeightedDataset& dataset, const TrainingConfig& config,
                                    Rng& rng) {
  if (dataset.size() == 0) throw EmptyInputError("cannot fit on an empty dataset");
  if (dataset.weights.size() != dataset.size()) {
    throw DimensionError("weights and points are misaligned");
  }
  const Eigen::MatrixXd x = to_columns(dataset.points, dim_);
  const auto p_vec = sampling_distribution(dataset.weights);
  const Eigen::VectorXd p = to_eigen(p_vec);
  if (!initialized_) initialize(x, p_vec, rng);

  std::size_t budget = max_iterations_;
  if (config.max_steps > 0) budget = std::min(budget, config.max_steps);

  FitReport report;
  Eigen::MatrixXd resp;
  double ll = weighted_ll(log_joint(x), p, &resp);
  report.history.push_back(ll);
  for (std::size_t step = 1; step <= budget; ++step) {
    for (std::size_t c = 0; c < components_; ++c) {
      const Eigen::VectorXd pr = resp.col(static_cast<Eigen::Index>(c)).cwiseProduct(p);
      const double mass = pr.sum();
      if (!(mass > 0.0)) {
        mixing_[c] = 0.0;
        continue;
      }
      mixing_[c] = mass;
      means_[c] = (x * pr) / mass;
      const Eigen::MatrixXd centered = x.colwise() - means_[c];
      covs_[c] = clip_covariance(centered * pr.asDiagonal() * centered.transpose() / mass);
    }
    refresh_factors();
    const double next = weighted_ll(log_joint(x), p, &resp);
    if (!std::isfinite(next)) {
      throw NumericalError("weighted EM diverged at step " + std::to_string(step));
    }
    report.history.push_back(next);
    report.epochs_run = step;
    const double gain = next - ll;
    ll = next;
    if (gain < tolerance_) break;
  }
  report.weighted_loss = -ll;
  meta_.epochs_seen += report.epochs_run;
  meta_.last_loss = report.weighted_loss;
  return report;
}

Point WeightedGmm::encode(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("encode: expected dimension " + std::to_string(dim_));
  return Point(x.begin(), x.end());
}

Point WeightedGmm::decode(std::span<const double> z) const {
  if (z.size() != dim_) throw DimensionError("decode: expected dimension " + std::to_string(dim_));
  return Point(z.begin(), z.end());
}

std::vector<Point> WeightedGmm::sample_latent(std::size_t n, Rng& rng) const {
  if (n == 0) throw ParameterError("sample_latent: n must be at least 1");
  if (!initialized_) throw ParameterError("mixture has not been fitted");
  WeightedSampler pick(mixing_);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> out(n, Point(dim_));
  Eigen::VectorXd eps(static_cast<Eigen::Index>(dim_));
  for (auto& z : out) {
    const std::size_t c = pick(rng);
    for (Eigen::Index j = 0; j < eps.size(); ++j) eps(j) = normal(rng);
    const Eigen::VectorXd draw = means_[c] + chol_[c].triangularView<Eigen::Lower>() * eps;
    for (std::size_t j = 0; j < dim_; ++j) z[j] = draw(static_cast<Eigen::Index>(j));
  }
  return out;
}

Checkpoint WeightedGmm::checkpoint() const {
  Checkpoint ckpt;
  ckpt.kind = ModelKind::weighted_gmm;
  ckpt.data_dim = dim_;
  ckpt.latent_dim = dim_;
  ckpt.meta = meta_;
  ckpt.settings = {{"components", static_cast<double>(components_)},
                   {"covariance_floor", floor_},
                   {"max_em_iterations", static_cast<double>(max_iterations_)},
                   {"em_tolerance", tolerance_},
                   {"initialized", initialized_ ? 1.0 : 0.0}};
  if (!initialized_) return ckpt;
  const std::size_t d = dim_;
  const std::size_t c = components_;
  ParameterArray mix{{c}, mixing_};
  ParameterArray mu{{c, d}, {}};
  ParameterArray cov{{c, d, d}, {}};
  for (std::size_t k = 0; k < c; ++k) {
    mu.values.insert(mu.values.end(), means_[k].data(), means_[k].data() + d);
    cov.values.insert(cov.values.end(), covs_[k].data(), covs_[k].data() + d * d);
  }
  ckpt.parameters = {
      {"mixing", std::move(mix)}, {"means", std::move(mu)}, {"covariances", std::move(cov)}};
  return ckpt;
}

std::unique_ptr<GenerativeModel> WeightedGmm::clone() const {
  return std::make_unique<WeightedGmm>(*this);
}

}  // namespace molso
