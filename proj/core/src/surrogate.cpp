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

#include "molso/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "molso/error.hpp"

namespace molso {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<KernelHyper> GpSurrogate::hyper_grid() {
  std::vector<KernelHyper> grid;
  for (int l = -2; l <= 2; ++l) {
    for (int s = -2; s <= 2; ++s) {
      grid.push_back({std::pow(10.0, l), std::pow(10.0, 0.5 * s)});
    }
  }
  return grid;
}

MatrixXd GpSurrogate::standardize(const MatrixXd& rows) const {
  return (rows.rowwise() - shift_).array().rowwise() / scale_.array();
}

MatrixXd GpSurrogate::kernel(const MatrixXd& a, const MatrixXd& b) const {
  const VectorXd an = a.rowwise().squaredNorm();
  const VectorXd bn = b.rowwise().squaredNorm();
  MatrixXd d2 = (-2.0 * a * b.transpose()).colwise() + an;
  d2.rowwise() += bn.transpose();
  const double inv = -0.5 / (hyper_.lengthscale * hyper_.lengthscale);
  const double s2 = hyper_.signal_std * hyper_.signal_std;
  return s2 * (d2.cwiseMax(0.0) * inv).array().exp();
}

bool GpSurrogate::factorize(double noise) {
  const Index n = inputs_.rows();
  MatrixXd k = kernel(inputs_, inputs_);
  k.diagonal().array() += noise;
  Eigen::LLT<MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return false;
  chol_ = llt.matrixL();
  if (!(chol_.diagonal().array() > 0.0).all()) return false;
  noise_ = noise;
  alpha_ = llt.solve(targets_);
  lml_ = -0.5 * targets_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return std::isfinite(lml_);
}

GpSurrogate GpSurrogate::fit(const MatrixXd& inputs, const VectorXd& targets,
                             std::optional<KernelHyper> hyper, double noise_variance) {
  if (inputs.rows() < 2) throw ParameterError("a GP needs at least two observations");
  if (targets.size() != inputs.rows()) throw DimensionError("inputs and targets are misaligned");
  if (!inputs.allFinite() || !targets.allFinite()) throw ParameterError("non-finite GP data");
  if (noise_variance < 1e-6) throw ParameterError("noise variance must be at least 1e-6");
  if (hyper && (!(hyper->lengthscale > 0.0) || !(hyper->signal_std > 0.0))) {
    throw ParameterError("kernel hyperparameters must be positive");
  }

  GpSurrogate gp;
  gp.shift_ = inputs.colwise().mean();
  const MatrixXd centered = inputs.rowwise() - gp.shift_;
  gp.scale_ =
      (centered.colwise().squaredNorm() / static_cast<double>(inputs.rows())).array().sqrt();
  for (Index j = 0; j < gp.scale_.size(); ++j) {
    if (!(gp.scale_(j) > 0.0)) gp.scale_(j) = 1.0;
  }
  gp.inputs_ = gp.standardize(inputs);
  gp.targets_ = targets;

  const std::vector<KernelHyper> candidates =
      hyper ? std::vector<KernelHyper>{*hyper} : hyper_grid();
  const double jitters[] = {0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4};

  std::optional<GpSurrogate> best;
  for (const auto& h : candidates) {
    GpSurrogate trial = gp;
    trial.hyper_ = h;
    bool ok = false;
    for (double jitter : jitters) {
      if (trial.factorize(noise_variance + jitter)) {
        ok = true;
        break;
      }
    }
    if (!ok) continue;
    if (!best || trial.lml_ > best->lml_) best = std::move(trial);
  }
  if (!best) {
    throw NumericalError("GP kernel matrix is not positive definite after jitter 1e-4");
  }
  return std::move(*best);
}

void GpSurrogate::predict_batch(const MatrixXd& queries, VectorXd& mean, VectorXd& stddev) const {
  if (queries.cols() != shift_.size()) throw DimensionError("GP query has the wrong dimension");
  const MatrixXd kq = kernel(standardize(queries), inputs_);  // q x n
  mean = kq * alpha_;
  MatrixXd v = kq.transpose();
  chol_.triangularView<Eigen::Lower>().solveInPlace(v);
  const double s2 = hyper_.signal_std * hyper_.signal_std;
  stddev = (s2 - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0).sqrt();
}

GpPrediction GpSurrogate::predict(std::span<const double> z) const {
  if (static_cast<Index>(z.size()) != shift_.size()) {
    throw DimensionError("GP query has the wrong dimension");
  }
  MatrixXd q = Eigen::Map<const Eigen::RowVectorXd>(z.data(), static_cast<Index>(z.size()));
  VectorXd mean;
  VectorXd sd;
  predict_batch(q, mean, sd);
  return {mean(0), sd(0)};
}

void GpSurrogate::add_observation(std::span<const double> z, double y) {
  if (static_cast<Index>(z.size()) != shift_.size()) {
    throw DimensionError("GP observation has the wrong dimension");
  }
  const MatrixXd row =
      standardize(Eigen::Map<const Eigen::RowVectorXd>(z.data(), static_cast<Index>(z.size())));
  const Index n = inputs_.rows();
  VectorXd kvec = kernel(inputs_, row);  // n x 1
  chol_.triangularView<Eigen::Lower>().solveInPlace(kvec);
  const double kss = hyper_.signal_std * hyper_.signal_std + noise_;
  const double d2 = kss - kvec.squaredNorm();
  if (!(d2 > 0.0)) throw NumericalError("fantasy observation makes the kernel singular");

  MatrixXd chol(n + 1, n + 1);
  chol.setZero();
  chol.topLeftCorner(n, n) = chol_;
  chol.block(n, 0, 1, n) = kvec.transpose();
  chol(n, n) = std::sqrt(d2);
  chol_ = std::move(chol);

  inputs_.conservativeResize(n + 1, Eigen::NoChange);
  inputs_.row(n) = row;
  targets_.conservativeResize(n + 1);
  targets_(n) = y;

  alpha_ = chol_.triangularView<Eigen::Lower>().solve(targets_);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
  lml_ = -0.5 * targets_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n + 1) * std::log(2.0 * std::numbers::pi);
}

double GpSurrogate::solve_residual() const {
  MatrixXd k = kernel(inputs_, inputs_);
  k.diagonal().array() += noise_;
  const double norm = targets_.norm();
  return (k * alpha_ - targets_).norm() / (norm > 0.0 ? norm : 1.0);
}

double expected_improvement(double mean, double stddev, double best) {
  const double gain = mean - best;
  if (!(stddev > 0.0)) return std::max(gain, 0.0);
  const double u = gain / stddev;
  const double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(gain * cdf + stddev * pdf, 0.0);
}

LatentBounds LatentBounds::from_training(const MatrixXd& latents, double margin) {
  if (latents.rows() == 0) throw EmptyInputError("no latents to derive bounds from");
  LatentBounds b;
  for (Index j = 0; j < latents.cols(); ++j) {
    const double lo = latents.col(j).minCoeff();
    const double hi = latents.col(j).maxCoeff();
    const double range = hi - lo;
    if (range > 0.0) {
      b.lower.push_back(lo - margin * range);
      b.upper.push_back(hi + margin * range);
    } else {
      b.lower.push_back(lo - 0.5);
      b.upper.push_back(hi + 0.5);
    }
  }
  return b;
}

std::vector<Point> propose_batch(const GpSurrogate& model, const LatentBounds& bounds,
                                 std::size_t q, Rng& rng, const ProposalOptions& options,
                                 std::span<const Point> start_pool) {
  const std::size_t m = model.dim();
  if (q == 0) throw ParameterError("batch size must be at least 1");
  if (bounds.lower.size() != m || bounds.upper.size() != m) {
    throw DimensionError("bounds do not match the latent dimension");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(bounds.lower[j]) || !std::isfinite(bounds.upper[j]) ||
        !(bounds.upper[j] > bounds.lower[j])) {
      throw ParameterError("degenerate proposal bounds in dimension " + std::to_string(j));
    }
  }
  if (options.random_starts == 0) throw ParameterError("need at least one random start");
  for (const auto& p : start_pool) {
    if (p.size() != m) throw DimensionError("start point does not match the latent dimension");
  }

  GpSurrogate gp = model;
  const auto M = static_cast<Index>(m);
  const auto starts =
      static_cast<Index>(start_pool.empty() ? options.random_starts : start_pool.size());
  MatrixXd pool;
  if (!start_pool.empty()) {
    pool.resize(starts, M);
    for (Index r = 0; r < starts; ++r) {
      for (Index j = 0; j < M; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        pool(r, j) = std::clamp(start_pool[static_cast<std::size_t>(r)][jj], bounds.lower[jj],
                                bounds.upper[jj]);
      }
    }
  }
  std::vector<Point> picks;
  picks.reserve(q);
  VectorXd mean;
  VectorXd sd;
  for (std::size_t t = 0; t < q; ++t) {
    const double best = gp.best_target();
    MatrixXd cand = pool;
    if (start_pool.empty()) cand.resize(starts, M);
    for (Index j = 0; start_pool.empty() && j < M; ++j) {
      std::uniform_real_distribution<double> u(bounds.lower[static_cast<std::size_t>(j)],
                                               bounds.upper[static_cast<std::size_t>(j)]);
      for (Index r = 0; r < starts; ++r) cand(r, j) = u(rng);
    }
    gp.predict_batch(cand, mean, sd);
    Index arg = 0;
    double top = -1.0;
    for (Index r = 0; r < starts; ++r) {
      const double ei = expected_improvement(mean(r), sd(r), best);
      if (ei > top) {
        top = ei;
        arg = r;
      }
    }

    Point x(m);
    for (Index j = 0; j < M; ++j) x[static_cast<std::size_t>(j)] = cand(arg, j);
    std::vector<double> step(m);
    for (std::size_t j = 0; j < m; ++j) step[j] = 0.1 * (bounds.upper[j] - bounds.lower[j]);
    auto ei_at = [&](const Point& p) {
      const auto pred = gp.predict(p);
      return expected_improvement(pred.mean, pred.stddev, best);
    };
    for (std::size_t s = 0; s < options.refine_steps; ++s) {
      const std::size_t j = s % m;
      double best_val = top;
      Point best_x = x;
      for (double dir : {1.0, -1.0}) {
        Point trial = x;
        trial[j] = std::clamp(x[j] + dir * step[j], bounds.lower[j], bounds.upper[j]);
        const double v = ei_at(trial);
        if (v > best_val) {
          best_val = v;
          best_x = std::move(trial);
        }
      }
      if (best_val > top) {
        top = best_val;
        x = std::move(best_x);
      } else {
        step[j] *= 0.5;
      }
    }
    gp.add_observation(x, best);
    picks.push_back(std::move(x));
  }
  return picks;
}

}  // namespace molso
