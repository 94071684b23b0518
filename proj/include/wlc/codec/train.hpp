// Copyright 2026 The wlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wlc/codec/model.hpp"

namespace wlc {

// Training aborted because the loss or a gradient stopped being finite.
struct DivergenceError : Error {
  DivergenceError(const std::string& what, std::size_t step)
      : Error("training diverged at step " + std::to_string(step) + ": " + what), step(step) {}
  std::size_t step;
};

template <class T>
struct TrainResult {
  CodecModel<T> model;
  std::vector<double> loss_history;  // one entry per step
};

// Stacks patches[idx...] into [B, C, spatial...].
template <class T>
Tensor<T> stack_batch(const std::vector<Tensor<T>>& patches, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw ParameterError("stack_batch: empty batch");
  const Shape& s = patches[idx[0]].shape();
  Shape out = s;
  out.insert(out.begin(), idx.size());
  Tensor<T> batch(out);
  const std::size_t n = shape_size(s);
  for (std::size_t b = 0; b < idx.size(); ++b) {
    const auto& p = patches[idx[b]];
    require_same_shape(p.shape(), s, "stack_batch");
    std::memcpy(batch.data() + b * n, p.data(), n * sizeof(T));
  }
  return batch;
}

inline double cosine_learning_rate(const TrainOptions& o, std::size_t step) {
  if (o.steps <= 1) return o.learning_rate;
  const double t = static_cast<double>(step) / static_cast<double>(o.steps - 1);
  const double lo = o.learning_rate * o.final_lr_fraction;
  return lo + 0.5 * (o.learning_rate - lo) * (1.0 + std::cos(std::numbers::pi * t));
}

// Linear warm start. The analysis layer takes the leading C_z eigenvectors
// of the subband covariance of `patches` (one sample per spatial position),
// biased to centre them, and each companding scale is `sigma_multiple`
// times the matching standard deviation. When hidden >= C_z the synthesis
// side is set to the exact inverse projection: entry divides by sigma, the
// residual branches start at zero and exit maps back onto the eigenvectors
// plus the mean. Training then refines from the best linear code.
template <class T>
void pca_warm_start(CodecModel<T>& model, const std::vector<Tensor<T>>& patches, double sigma_multiple = 4.0,
                    std::size_t max_positions = 200000) {
  if (patches.empty()) throw ParameterError("pca_warm_start: no patches");
  const CodecConfig& c = model.config();
  const std::size_t cs = c.subband_channels(), cz = c.latent_channels, hid = c.hidden;
  const auto ecs = static_cast<Eigen::Index>(cs);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(ecs, ecs);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(ecs);
  Eigen::VectorXd v(ecs);
  std::size_t count = 0;
  for (const auto& p : patches) {
    model.latent_shape(p.shape());
    const Tensor<T> bands = wpt_analyze_planes(p, c.kind, static_cast<int>(c.levels));
    const std::size_t pos = bands.size() / cs;
    for (std::size_t i = 0; i < pos && count < max_positions; ++i, ++count) {
      for (std::size_t k = 0; k < cs; ++k) v[static_cast<Eigen::Index>(k)] = static_cast<double>(bands[k * pos + i]);
      mean += v;
      cov.selfadjointView<Eigen::Lower>().rankUpdate(v);
    }
    if (count >= max_positions) break;
  }
  const double n = static_cast<double>(count);
  mean /= n;
  Eigen::MatrixXd full = cov.selfadjointView<Eigen::Lower>();
  full = full / n - mean * mean.transpose();
  if (!full.allFinite()) throw DivergenceError("pca_warm_start: non-finite subband statistics", 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(full);
  if (eig.info() != Eigen::Success) throw NumericError("pca_warm_start: eigendecomposition failed");

  const bool decoder = hid >= cz;
  if (decoder) {
    model.entry_weight.value.fill(T(0));
    model.entry_bias.value.fill(T(0));
    model.exit_weight.value.fill(T(0));
    for (auto& b : model.blocks) {
      b.conv_b_weight.value.fill(T(0));
      b.conv_b_bias.value.fill(T(0));
    }
    for (std::size_t k = 0; k < cs; ++k) model.exit_bias.value[k] = static_cast<T>(mean[static_cast<Eigen::Index>(k)]);
  }
  for (std::size_t j = 0; j < cz; ++j) {
    const Eigen::Index col = ecs - 1 - static_cast<Eigen::Index>(j);
    const Eigen::VectorXd dir = eig.eigenvectors().col(col);
    const double sigma = std::max(sigma_multiple * std::sqrt(std::max(eig.eigenvalues()[col], 0.0)), 1e-3);
    for (std::size_t k = 0; k < cs; ++k) {
      model.analysis_weight.value[k * cz + j] = static_cast<T>(dir[static_cast<Eigen::Index>(k)]);
    }
    model.analysis_bias.value[j] = static_cast<T>(-dir.dot(mean));
    model.log_scale.value[j] = static_cast<T>(std::log(sigma));
    if (decoder) {
      model.entry_weight.value[j * hid + j] = static_cast<T>(1.0 / sigma);
      for (std::size_t k = 0; k < cs; ++k) {
        model.exit_weight.value[j * cs + k] = static_cast<T>(sigma * dir[static_cast<Eigen::Index>(k)]);
      }
    }
  }
}

using TrainLogger = std::function<void(std::size_t step, double loss)>;

// Continues optimising `model` in place on randomly drawn batches of
// `patches`. Deterministic given options.seed.
template <class T>
std::vector<double> train_in_place(CodecModel<T>& model, const std::vector<Tensor<T>>& patches,
                                   const TrainOptions& options, const TrainLogger& log = {}) {
  if (patches.empty()) throw ParameterError("train: no training patches");
  if (options.batch == 0) throw ParameterError("train: batch size must be positive");
  for (const auto& p : patches) model.latent_shape(p.shape());  // validates geometry

  Rng rng(options.seed ^ 0x5DEECE66DULL);
  Adam<T> opt(model.parameters(), AdamConfig{options.learning_rate});
  const Shape lshape = model.latent_shape(patches.front().shape());
  Shape noise_shape = lshape;
  noise_shape.insert(noise_shape.begin(), options.batch);
  const double width = model.config().noise_width;

  std::vector<double> history;
  history.reserve(options.steps);
  std::vector<std::size_t> idx(options.batch);
  for (std::size_t step = 0; step < options.steps; ++step) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(patches.size()));
    Tensor<T> batch = stack_batch(patches, idx);
    Tensor<T> noise(noise_shape);
    if (width > 0.0)
      for (auto& v : noise) v = static_cast<T>(rng.uniform(-0.5 * width, 0.5 * width));

    opt.set_learning_rate(cosine_learning_rate(options, step));
    opt.zero_grad();
    double loss = 0.0;
    try {
      Tape<T> tape;
      Var l = model.training_loss(tape, batch, width > 0.0 ? &noise : nullptr);
      loss = static_cast<double>(tape.value(l)[0]);
      tape.backward(l);
      opt.step();
    } catch (const NumericError& e) {
      throw DivergenceError(e.what(), step);
    }
    if (!std::isfinite(loss)) throw DivergenceError("loss is " + std::to_string(loss), step);
    history.push_back(loss);
    if (log && options.log_every && (step % options.log_every == 0 || step + 1 == options.steps)) {
      log(step, loss);
    }
  }
  return history;
}

template <class T>
TrainResult<T> train(const CodecConfig& config, const std::vector<Tensor<T>>& patches,
                     const TrainOptions& options, const TrainLogger& log = {}) {
  TrainResult<T> r{CodecModel<T>(config), {}};
  r.model.init(options.seed);
  if (options.pca_init) pca_warm_start(r.model, patches, options.pca_sigma_multiple);
  r.loss_history = train_in_place(r.model, patches, options, log);
  return r;
}

}  // namespace wlc
