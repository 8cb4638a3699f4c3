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

#include "molso/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <type_traits>

#include "molso/error.hpp"

namespace molso {
namespace {

using Eigen::Index;
using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Block {
  const char* name;
  Index rows;
  Index cols;
  Index offset;
};

// Parameter blocks in storage order.
std::vector<Block> layout(std::size_t d, std::size_t h, std::size_t m) {
  const auto D = static_cast<Index>(d);
  const auto H = static_cast<Index>(h);
  const auto M = static_cast<Index>(m);
  std::vector<Block> blocks = {
      {"enc1.weight", H, D, 0}, {"enc1.bias", H, 1, 0},         {"enc_mu.weight", M, H, 0},
      {"enc_mu.bias", M, 1, 0}, {"enc_logvar.weight", M, H, 0}, {"enc_logvar.bias", M, 1, 0},
      {"dec1.weight", H, M, 0}, {"dec1.bias", H, 1, 0},         {"dec2.weight", D, H, 0},
      {"dec2.bias", D, 1, 0},
  };
  Index offset = 0;
  for (auto& b : blocks) {
    b.offset = offset;
    offset += b.rows * b.cols;
  }
  return blocks;
}

Index total_size(const std::vector<Block>& blocks) {
  return blocks.back().offset + blocks.back().rows * blocks.back().cols;
}

// Named views into a flat parameter (or gradient) vector.
template <class Scalar>
struct Views {
  using Mat = Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>>;
  using CMat = Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>>;
  using M = std::conditional_t<std::is_const_v<Scalar>, CMat, Mat>;

  Views(Scalar* base, const std::vector<Block>& b)
      : w1(base + b[0].offset, b[0].rows, b[0].cols),
        b1(base + b[1].offset, b[1].rows, 1),
        wm(base + b[2].offset, b[2].rows, b[2].cols),
        bm(base + b[3].offset, b[3].rows, 1),
        wv(base + b[4].offset, b[4].rows, b[4].cols),
        bv(base + b[5].offset, b[5].rows, 1),
        w3(base + b[6].offset, b[6].rows, b[6].cols),
        b3(base + b[7].offset, b[7].rows, 1),
        w4(base + b[8].offset, b[8].rows, b[8].cols),
        b4(base + b[9].offset, b[9].rows, 1) {}

  M w1, b1, wm, bm, wv, bv, w3, b3, w4, b4;
};

VectorXd activate(const VectorXd& h, Activation a) {
  return a == Activation::tanh ? VectorXd(h.array().tanh()) : h;
}

// Derivative expressed through the activation output.
VectorXd activation_slope(const VectorXd& out, Activation a) {
  return a == Activation::tanh ? VectorXd(1.0 - out.array().square()) : VectorXd::Ones(out.size());
}

VectorXd to_eigen(std::span<const double> v) {
  return Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

MiniAutoencoder::MiniAutoencoder(const ModelConfig& config, std::size_t dim)
    : dim_(dim),
      latent_(config.latent_dim),
      hidden_(config.hidden),
      beta_(config.beta),
      sigma_dec_(config.sigma_dec),
      activation_(config.activation) {
  if (dim_ == 0 || latent_ == 0 || hidden_ == 0) {
    throw ParameterError("autoencoder dimensions must be positive");
  }
  if (!(sigma_dec_ > 0.0) || beta_ < 0.0) throw ParameterError("invalid sigma_dec or beta");
  meta_.seed = config.init_seed;
  Rng rng(config.init_seed);
  std::uniform_real_distribution<double> u(-config.init_scale, config.init_scale);
  theta_.resize(total_size(layout(dim_, hidden_, latent_)));
  for (Index i = 0; i < theta_.size(); ++i) theta_(i) = u(rng);
}

MiniAutoencoder::MiniAutoencoder(const Checkpoint& ckpt)
    : dim_(ckpt.data_dim),
      latent_(ckpt.latent_dim),
      hidden_(static_cast<std::size_t>(ckpt.settings.at("hidden"))),
      beta_(ckpt.settings.at("beta")),
      sigma_dec_(ckpt.settings.at("sigma_dec")),
      activation_(ckpt.settings.at("activation") != 0.0 ? Activation::identity : Activation::tanh) {
  if (ckpt.kind != ModelKind::mini_autoencoder) {
    throw ParameterError("checkpoint is not an autoencoder");
  }
  meta_ = ckpt.meta;
  const auto blocks = layout(dim_, hidden_, latent_);
  theta_.resize(total_size(blocks));
  for (const auto& b : blocks) {
    const auto& array = ckpt.parameters.at(b.name);
    if (array.values.size() != static_cast<std::size_t>(b.rows * b.cols)) {
      throw DimensionError(std::string("checkpoint array ") + b.name + " has the wrong size");
    }
    std::copy(array.values.begin(), array.values.end(), theta_.data() + b.offset);
  }
}

void MiniAutoencoder::check_dim(std::size_t got, std::size_t want, const char* what) const {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

void MiniAutoencoder::set_parameters(const VectorXd& theta) {
  if (theta.size() != theta_.size()) throw DimensionError("parameter vector has the wrong size");
  theta_ = theta;
}

double MiniAutoencoder::example_loss(const VectorXd& x, const VectorXd& eps, double scale,
                                     VectorXd* gradient) const {
  const auto blocks = layout(dim_, hidden_, latent_);
  Views<const double> p(theta_.data(), blocks);

  const VectorXd a1 = activate(p.w1 * x + p.b1, activation_);
  const VectorXd mu = p.wm * a1 + p.bm;
  const VectorXd logvar = p.wv * a1 + p.bv;
  const VectorXd sd = (0.5 * logvar.array()).exp();
  const VectorXd z = mu + sd.cwiseProduct(eps);
  const VectorXd a2 = activate(p.w3 * z + p.b3, activation_);
  const VectorXd xhat = p.w4 * a2 + p.b4;

  const double s2 = sigma_dec_ * sigma_dec_;
  const double recon = (x - xhat).squaredNorm() / (2.0 * s2);
  const double kl = 0.5 * (mu.array().square() + logvar.array().exp() - 1.0 - logvar.array()).sum();
  const double loss = recon + beta_ * kl;
  if (!gradient) return loss;

  Views<double> g(gradient->data(), blocks);
  const VectorXd d_xhat = scale * (xhat - x) / s2;
  g.w4.noalias() += d_xhat * a2.transpose();
  g.b4 += d_xhat;
  const VectorXd d_h2 = (p.w4.transpose() * d_xhat).cwiseProduct(activation_slope(a2, activation_));
  g.w3.noalias() += d_h2 * z.transpose();
  g.b3 += d_h2;
  const VectorXd d_z = p.w3.transpose() * d_h2;
  const VectorXd d_mu = d_z + scale * beta_ * mu;
  const VectorXd d_logvar = 0.5 * d_z.cwiseProduct(eps).cwiseProduct(sd) +
                            VectorXd(scale * beta_ * 0.5 * (logvar.array().exp() - 1.0));
  g.wm.noalias() += d_mu * a1.transpose();
  g.bm += d_mu;
  g.wv.noalias() += d_logvar * a1.transpose();
  g.bv += d_logvar;
  const VectorXd d_h1 = (p.wm.transpose() * d_mu + p.wv.transpose() * d_logvar)
                            .cwiseProduct(activation_slope(a1, activation_));
  g.w1.noalias() += d_h1 * x.transpose();
  g.b1 += d_h1;
  return loss;
}

double MiniAutoencoder::weighted_loss(const std::vector<Point>& points,
                                      std::span<const double> weights, const MatrixXd& noise,
                                      VectorXd* gradient) const {
  const auto p = sampling_distribution(weights);
  if (p.size() != points.size()) throw DimensionError("weights and points are misaligned");
  if (noise.rows() != static_cast<Index>(latent_) ||
      noise.cols() != static_cast<Index>(points.size())) {
    throw DimensionError("noise matrix must be latent_dim x n");
  }
  if (gradient) gradient->setZero(theta_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    check_dim(points[i].size(), dim_, "weighted_loss");
    if (p[i] == 0.0) continue;
    total +=
        p[i] * example_loss(to_eigen(points[i]), noise.col(static_cast<Index>(i)), p[i], gradient);
  }
  return total;
}

FitReport MiniAutoencoder::fit_weighted(const WeightedDataset& dataset,
                                        const TrainingConfig& config, Rng& rng) {
  const std::size_t n = dataset.size();
  if (n == 0) throw EmptyInputError("cannot fit on an empty dataset");
  if (config.batch_size == 0 || !(config.learning_rate > 0.0)) {
    throw ParameterError("batch size and learning rate must be positive");
  }
  for (const auto& x : dataset.points) check_dim(x.size(), dim_, "fit_weighted");
  const auto p = sampling_distribution(dataset.weights);
  if (p.size() != n) throw DimensionError("weights and points are misaligned");

  const WeightedSampler sampler(p);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const auto m = static_cast<Index>(latent_);

  FitReport report;
  VectorXd grad(theta_.size());
  VectorXd eps(m);
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> batch;
  std::size_t steps = 0;
  bool stop = false;
  for (std::size_t epoch = 1; epoch <= config.epochs && !stop; ++epoch) {
    if (config.weighting_mode == WeightingMode::loss_multiplier) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
    }
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      batch.clear();
      if (config.weighting_mode == WeightingMode::resample) {
        for (std::size_t b = 0; b < config.batch_size; ++b) batch.push_back(sampler(rng));
      } else {
        const std::size_t begin = s * config.batch_size;
        const std::size_t end = std::min(n, begin + config.batch_size);
        batch.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
      }
      grad.setZero();
      double batch_loss = 0.0;
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      for (std::size_t i : batch) {
        const double scale = config.weighting_mode == WeightingMode::resample
                                 ? inv_b
                                 : static_cast<double>(n) * p[i] * inv_b;
        if (scale == 0.0) continue;
        for (Index j = 0; j < m; ++j) eps(j) = normal(rng);
        batch_loss += scale * example_loss(to_eigen(dataset.points[i]), eps, scale, &grad);
      }
      if (!std::isfinite(batch_loss) || !grad.allFinite()) {
        throw NumericalError("autoencoder training diverged at epoch " + std::to_string(epoch));
      }
      theta_ -= config.learning_rate * grad;
      epoch_loss += batch_loss;
      ++epoch_steps;
      if (config.max_steps > 0 && ++steps >= config.max_steps) {
        stop = true;
        break;
      }
    }
    report.history.push_back(epoch_loss / static_cast<double>(epoch_steps));
    report.epochs_run = epoch;
  }
  report.weighted_loss = report.history.empty() ? 0.0 : report.history.back();
  meta_.epochs_seen += report.epochs_run;
  meta_.last_loss = report.weighted_loss;
  return report;
}

Point MiniAutoencoder::encode(std::span<const double> x) const {
  check_dim(x.size(), dim_, "encode");
  Views<const double> p(theta_.data(), layout(dim_, hidden_, latent_));
  const VectorXd mu = p.wm * activate(p.w1 * to_eigen(x) + p.b1, activation_) + p.bm;
  return Point(mu.data(), mu.data() + mu.size());
}

Point MiniAutoencoder::decode(std::span<const double> z) const {
  check_dim(z.size(), latent_, "decode");
  Views<const double> p(theta_.data(), layout(dim_, hidden_, latent_));
  const VectorXd xhat = p.w4 * activate(p.w3 * to_eigen(z) + p.b3, activation_) + p.b4;
  return Point(xhat.data(), xhat.data() + xhat.size());
}

std::vector<Point> MiniAutoencoder::sample_latent(std::size_t n, Rng& rng) const {
  if (n == 0) throw ParameterError("sample_latent: n must be at least 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> out(n, Point(latent_));
  for (auto& z : out) {
    for (auto& v : z) v = normal(rng);
  }
  return out;
}

Checkpoint MiniAutoencoder::checkpoint() const {
  Checkpoint ckpt;
  ckpt.kind = ModelKind::mini_autoencoder;
  ckpt.data_dim = dim_;
  ckpt.latent_dim = latent_;
  ckpt.meta = meta_;
  ckpt.settings = {{"hidden", static_cast<double>(hidden_)},
                   {"beta", beta_},
                   {"sigma_dec", sigma_dec_},
                   {"activation", activation_ == Activation::identity ? 1.0 : 0.0}};
  for (const auto& b : layout(dim_, hidden_, latent_)) {
    ParameterArray array;
    array.shape = {static_cast<std::size_t>(b.rows), static_cast<std::size_t>(b.cols)};
    array.values.assign(theta_.data() + b.offset, theta_.data() + b.offset + b.rows * b.cols);
    ckpt.parameters.emplace(b.name, std::move(array));
  }
  return ckpt;
}

std::unique_ptr<GenerativeModel> MiniAutoencoder::clone() const {
  return std::make_unique<MiniAutoencoder>(*this);
}

double gradient_check(const MiniAutoencoder& model, const WeightedDataset& dataset, Rng& rng,
                      std::size_t count, double step) {
  const auto m = static_cast<Index>(model.latent_dim());
  MatrixXd noise(m, static_cast<Index>(dataset.size()));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index c = 0; c < noise.cols(); ++c) {
    for (Index r = 0; r < m; ++r) noise(r, c) = normal(rng);
  }

  VectorXd analytic;
  model.weighted_loss(dataset.points, dataset.weights, noise, &analytic);

  std::vector<std::size_t> indices(model.parameter_count());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::shuffle(indices.begin(), indices.end(), rng);
  indices.resize(std::min(count, indices.size()));

  MiniAutoencoder probe = model;
  const VectorXd theta = model.parameters();
  double worst = 0.0;
  for (std::size_t i : indices) {
    VectorXd shifted = theta;
    shifted(static_cast<Index>(i)) = theta(static_cast<Index>(i)) + step;
    probe.set_parameters(shifted);
    const double up = probe.weighted_loss(dataset.points, dataset.weights, noise, nullptr);
    shifted(static_cast<Index>(i)) = theta(static_cast<Index>(i)) - step;
    probe.set_parameters(shifted);
    const double down = probe.weighted_loss(dataset.points, dataset.weights, noise, nullptr);
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic(static_cast<Index>(i));
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace molso
