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

// Learning on codec latents versus resized pixels. A synthetic two-class
// texture task keeps its class evidence at high spatial frequency, a small
// convolutional classifier is trained on each representation, and the
// held-out accuracies are compared at equal input dimension.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wlc/codec.hpp"
#include "wlc/diffcore.hpp"
#include "wlc/keyvalue.hpp"
#include "wlc/resample.hpp"
#include "wlc/rng.hpp"

namespace wlc {

struct CalibrationError : Error {
  using Error::Error;
};
struct InconclusiveError : Error {
  using Error::Error;
};

// Class 1: a single sinusoidal grating at a random orientation. Class 0:
// isotropic noise band-limited to the same annulus. Both ride on a smooth
// random background and share the same radial power envelope and RMS.
struct TaskSpec {
  std::uint64_t seed = 0;
  std::size_t count = 2000;  // even; half per class
  std::size_t channels = 3;
  std::size_t extent = 64;
  double band_low = 0.20;  // cycles per pixel
  double band_high = 0.35;
  double texture_rms = 0.2;
  double background_amplitude = 0.3;
  double noise_rms = 0.04;  // white per-pixel noise, both classes
  double train_fraction = 0.75;
  // Calibration bounds for the reference classifier.
  double min_full_accuracy = 0.90;
  double max_reduced_accuracy = 0.60;
  std::size_t calibration_factor = 8;
};

struct TextureTask {
  TaskSpec spec;
  std::vector<Tensor<float>> images;
  std::vector<int> labels;
  std::size_t train_count = 0;
  double full_accuracy = 0.0;     // reference classifier, full resolution
  double reduced_accuracy = 0.0;  // reference classifier, downsampled
};

namespace detail {

using Complex = std::complex<double>;

// In-place 2D DFT of a row-major h x w grid.
inline void fft2(std::vector<Complex>& grid, std::size_t h, std::size_t w, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in, out;
  auto run = [&](std::size_t n) {
    out.resize(n);
    if (inverse) {
      fft.inv(out, in);
    } else {
      fft.fwd(out, in);
    }
  };
  for (std::size_t r = 0; r < h; ++r) {
    in.assign(grid.begin() + static_cast<std::ptrdiff_t>(r * w), grid.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
    run(w);
    std::copy(out.begin(), out.end(), grid.begin() + static_cast<std::ptrdiff_t>(r * w));
  }
  in.resize(h);
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t r = 0; r < h; ++r) in[r] = grid[r * w + c];
    run(h);
    for (std::size_t r = 0; r < h; ++r) grid[r * w + c] = out[r];
  }
}

// Signed frequency of DFT bin k of n, in cycles per sample.
inline double bin_frequency(std::size_t k, std::size_t n) {
  const auto s = static_cast<double>(k);
  return (k <= n / 2 ? s : s - static_cast<double>(n)) / static_cast<double>(n);
}

// Raised-cosine annulus with 0.02 cycle/pixel shoulders.
inline double band_envelope(double f, double lo, double hi) {
  constexpr double kShoulder = 0.02;
  if (f < lo - kShoulder || f > hi + kShoulder) return 0.0;
  if (f < lo) return 0.5 - 0.5 * std::cos(std::numbers::pi * (f - lo + kShoulder) / kShoulder);
  if (f > hi) return 0.5 + 0.5 * std::cos(std::numbers::pi * (f - hi) / kShoulder);
  return 1.0;
}

inline void normalise_rms(std::vector<double>& v, double rms) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double cur = std::sqrt(s / static_cast<double>(v.size()));
  if (cur > 0.0)
    for (double& x : v) x *= rms / cur;
}

inline std::vector<double> isotropic_texture(const TaskSpec& s, Rng& rng) {
  const std::size_t n = s.extent;
  std::vector<Complex> g(n * n);
  for (auto& v : g) v = rng.normal();
  fft2(g, n, n, false);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double f = std::hypot(bin_frequency(r, n), bin_frequency(c, n));
      g[r * n + c] *= band_envelope(f, s.band_low, s.band_high);
    }
  fft2(g, n, n, true);
  std::vector<double> t(n * n);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g[i].real();
  normalise_rms(t, s.texture_rms);
  return t;
}

// Radial frequency drawn with density proportional to f * envelope(f)^2, the
// radial marginal of the isotropic class's power spectrum.
inline std::vector<double> grating_texture(const TaskSpec& s, Rng& rng) {
  const double lo = s.band_low - 0.02, hi = s.band_high + 0.02;
  double f = 0.0;
  for (;;) {
    f = rng.uniform(lo, hi);
    const double e = band_envelope(f, s.band_low, s.band_high);
    if (rng.uniform(0.0, hi) < f * e * e) break;
  }
  const double theta = rng.uniform(0.0, std::numbers::pi), phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double fx = f * std::cos(theta), fy = f * std::sin(theta);
  const std::size_t n = s.extent;
  std::vector<double> t(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      t[r * n + c] = std::cos(2.0 * std::numbers::pi * (fx * static_cast<double>(c) + fy * static_cast<double>(r)) + phase);
  normalise_rms(t, s.texture_rms);
  return t;
}

// Background: a few low-frequency sinusoids (at most 3 cycles across the
// image) per channel, plus a white noise floor.
inline Tensor<float> texture_image(const TaskSpec& s, int label, Rng& rng) {
  const std::size_t n = s.extent;
  const std::vector<double> tex = label ? grating_texture(s, rng) : isotropic_texture(s, rng);
  Tensor<float> img({s.channels, n, n});
  for (std::size_t ch = 0; ch < s.channels; ++ch) {
    const double gain = rng.uniform(0.6, 1.0), offset = rng.uniform(-0.3, 0.3);
    std::vector<double> bg(n * n, offset);
    for (int k = 0; k < 3; ++k) {
      const double kx = static_cast<double>(rng.below(4)), ky = static_cast<double>(rng.below(4));
      const double a = s.background_amplitude / 3.0 * rng.uniform(0.3, 1.0), ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          bg[r * n + c] += a * std::cos(2.0 * std::numbers::pi *
                                             (kx * static_cast<double>(c) + ky * static_cast<double>(r)) /
                                             static_cast<double>(n) +
                                         ph);
    }
    for (std::size_t i = 0; i < n * n; ++i)
      img[ch * n * n + i] = static_cast<float>(std::clamp(bg[i] + gain * tex[i] + s.noise_rms * rng.normal(), -1.0, 1.0));
  }
  return img;
}

// Log power of the channel-mean image in radial x orientation bins over
// the band [0.05, 0.5) cycles/pixel.
inline Eigen::VectorXd spectral_features(const Tensor<float>& img) {
  constexpr int kRadial = 6, kAngular = 8;
  const std::size_t ch = img.extent(0), h = img.extent(1), w = img.extent(2);
  std::vector<Complex> g(h * w);
  for (std::size_t i = 0; i < h * w; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ch; ++c) acc += img[c * h * w + i];
    g[i] = acc / static_cast<double>(ch);
  }
  fft2(g, h, w, false);
  Eigen::VectorXd power = Eigen::VectorXd::Zero(kRadial * kAngular);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      const double fy = bin_frequency(r, h), fx = bin_frequency(c, w), f = std::hypot(fx, fy);
      if (f < 0.05 || f >= 0.5) continue;
      const int rb = std::min(kRadial - 1, static_cast<int>((f - 0.05) / 0.45 * kRadial));
      double a = std::atan2(fy, fx);
      if (a < 0) a += std::numbers::pi;
      const int ab = std::min(kAngular - 1, static_cast<int>(a / std::numbers::pi * kAngular));
      power[rb * kAngular + ab] += std::norm(g[r * w + c]);
    }
  return (power.array() + 1e-6).log().matrix();
}

// L2-regularised logistic regression by Newton iterations on standardised
// features; returns held-out accuracy.
inline double logistic_accuracy(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& y, std::size_t n_train) {
  const auto d = static_cast<Eigen::Index>(x.front().size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d), sd = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n_train; ++i) mean += x[i];
  mean /= static_cast<double>(n_train);
  for (std::size_t i = 0; i < n_train; ++i) sd += (x[i] - mean).array().square().matrix();
  sd = (sd / static_cast<double>(n_train)).cwiseSqrt().array().max(1e-9).matrix();
  auto feat = [&](std::size_t i) {
    Eigen::VectorXd v(d + 1);
    v << ((x[i] - mean).array() / sd.array()).matrix(), 1.0;
    return v;
  };
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  constexpr double kRidge = 1e-2;
  for (int it = 0; it < 25; ++it) {
    Eigen::MatrixXd hess = kRidge * Eigen::MatrixXd::Identity(d + 1, d + 1);
    Eigen::VectorXd grad = kRidge * beta;
    for (std::size_t i = 0; i < n_train; ++i) {
      const Eigen::VectorXd v = feat(i);
      const double p = 1.0 / (1.0 + std::exp(-v.dot(beta)));
      grad += (p - y[i]) * v;
      hess += p * (1.0 - p) * v * v.transpose();
    }
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta -= step;
    if (step.norm() < 1e-8) break;
  }
  std::size_t hit = 0;
  for (std::size_t i = n_train; i < x.size(); ++i) hit += (feat(i).dot(beta) > 0.0) == (y[i] == 1);
  return static_cast<double>(hit) / static_cast<double>(x.size() - n_train);
}

}  // namespace detail

// Held-out accuracy of the spectral reference classifier on `images`,
// optionally after a bicubic round trip through 1/factor resolution.
inline double reference_accuracy(const std::vector<Tensor<float>>& images, const std::vector<int>& labels,
                                 std::size_t n_train, std::size_t factor = 1) {
  std::vector<Eigen::VectorXd> x;
  x.reserve(images.size());
  for (const auto& img : images) {
    x.push_back(detail::spectral_features(factor > 1 ? bicubic_round_trip(img, factor, false) : img));
  }
  return detail::logistic_accuracy(x, labels, n_train);
}

// Deterministic and balanced; throws CalibrationError when the reference
// classifier does not see the intended full/reduced resolution gap.
inline TextureTask gen_texture_task(const TaskSpec& spec) {
  if (spec.count < 8 || spec.count % 2) throw ParameterError("texture task: count must be even and >= 8");
  if (spec.extent % (spec.calibration_factor * 4)) {
    throw ParameterError("texture task: extent must be a multiple of 4 * calibration_factor");
  }
  if (!(spec.band_low > 0.0 && spec.band_low < spec.band_high && spec.band_high + 0.02 <= 0.5)) {
    throw ParameterError("texture task: band must satisfy 0 < low < high <= 0.48");
  }
  TextureTask t;
  t.spec = spec;
  t.labels.resize(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) t.labels[i] = static_cast<int>(i % 2);
  Rng rng(spec.seed ^ 0x7E47E47E47E4ULL);
  rng.shuffle(t.labels.begin(), t.labels.end());
  t.images.reserve(spec.count);
  for (int label : t.labels) t.images.push_back(detail::texture_image(spec, label, rng));
  t.train_count = static_cast<std::size_t>(std::lround(spec.train_fraction * static_cast<double>(spec.count)));
  t.train_count = std::clamp<std::size_t>(t.train_count, 2, spec.count - 2);

  t.full_accuracy = reference_accuracy(t.images, t.labels, t.train_count);
  t.reduced_accuracy = reference_accuracy(t.images, t.labels, t.train_count, spec.calibration_factor);
  if (t.full_accuracy < spec.min_full_accuracy || t.reduced_accuracy > spec.max_reduced_accuracy) {
    throw CalibrationError("texture task calibration failed: full-resolution accuracy " +
                           std::to_string(t.full_accuracy) + " (need >= " + std::to_string(spec.min_full_accuracy) +
                           "), " + std::to_string(spec.calibration_factor) + "x downsampled accuracy " +
                           std::to_string(t.reduced_accuracy) + " (need <= " +
                           std::to_string(spec.max_reduced_accuracy) + "); adjust the band or texture level");
  }
  return t;
}

enum class FeatureKind { kLatent, kDownsample, kIdentity };

struct FeatureMode {
  FeatureKind kind = FeatureKind::kIdentity;
  const CodecModel<float>* model = nullptr;  // latent mode
  std::size_t factor = 1;                    // downsample mode

  static FeatureMode latent(const CodecModel<float>& m) { return {FeatureKind::kLatent, &m, 1}; }
  static FeatureMode downsample(std::size_t f) { return {FeatureKind::kDownsample, nullptr, f}; }
  static FeatureMode identity() { return {}; }

  std::string name() const {
    switch (kind) {
      case FeatureKind::kLatent:
        return "latent";
      case FeatureKind::kDownsample:
        return "downsample" + std::to_string(factor) + "x";
      case FeatureKind::kIdentity:
        break;
    }
    return "identity";
  }
};

// Channels-first feature maps. Latent mode stops after companding: no
// quantisation and no entropy coding.
inline std::vector<Tensor<float>> featurize(const std::vector<Tensor<float>>& images, const FeatureMode& mode) {
  std::vector<Tensor<float>> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    switch (mode.kind) {
      case FeatureKind::kLatent: {
        if (!mode.model) throw ParameterError("featurize: latent mode needs a codec model");
        out.push_back(compand(mode.model->analyze(img), mode.model->scales()).values);
        break;
      }
      case FeatureKind::kDownsample: {
        if (mode.factor < 1 || img.extent(1) % mode.factor || img.extent(2) % mode.factor) {
          throw ParameterError("featurize: downsample factor " + std::to_string(mode.factor) +
                               " does not divide " + shape_string(img.shape()));
        }
        out.push_back(resize_bicubic(img, {img.extent(1) / mode.factor, img.extent(2) / mode.factor}));
        break;
      }
      case FeatureKind::kIdentity:
        out.push_back(img);
        break;
    }
  }
  return out;
}

inline std::size_t feature_dimension(const std::vector<Tensor<float>>& f) { return f.empty() ? 0 : f.front().size(); }

// Largest relative gap allowed between compared feature dimensions.
inline constexpr double kDimensionTolerance = 0.01;

inline void check_dimensions_match(std::size_t a, std::size_t b) {
  const double gap = std::fabs(static_cast<double>(a) - static_cast<double>(b)) /
                     static_cast<double>(std::max<std::size_t>(std::max(a, b), 1));
  if (gap > kDimensionTolerance) {
    throw ShapeError("feature dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

struct ClassifierConfig {
  std::size_t width = 16;
  std::size_t steps = 600;
  std::size_t batch = 32;
  double learning_rate = 3e-3;
  double min_accuracy = 0.6;  // below this on every representation: inconclusive
};

inline ClassifierConfig classifier_config_from(const KeyValues& kv) {
  ClassifierConfig c;
  c.width = kv.number<std::size_t>("width", c.width);
  c.steps = kv.number<std::size_t>("steps", c.steps);
  c.batch = kv.number<std::size_t>("batch", c.batch);
  c.learning_rate = kv.number<double>("learning_rate", c.learning_rate);
  c.min_accuracy = kv.number<double>("min_accuracy", c.min_accuracy);
  if (!c.width || !c.steps || !c.batch || !(c.learning_rate > 0.0)) {
    throw ParameterError("classifier: width, steps, batch and learning_rate must be positive");
  }
  return c;
}

// conv3 -> SiLU -> conv3 -> SiLU -> global mean -> dense -> logit, on
// per-channel standardised inputs.
class TextureClassifier {
 public:
  TextureClassifier(std::size_t in_channels, const ClassifierConfig& cfg, std::uint64_t seed)
      : conv_a_w_("classifier.conv_a.weight", Tensor<float>({cfg.width, in_channels, 3, 3})),
        conv_a_b_("classifier.conv_a.bias", Tensor<float>({cfg.width})),
        conv_b_w_("classifier.conv_b.weight", Tensor<float>({cfg.width, cfg.width, 3, 3})),
        conv_b_b_("classifier.conv_b.bias", Tensor<float>({cfg.width})),
        dense_w_("classifier.dense.weight", Tensor<float>({cfg.width, 1})),
        dense_b_("classifier.dense.bias", Tensor<float>({1})) {
    Rng rng(seed);
    init_uniform(conv_a_w_.value, in_channels * 9, rng);
    init_uniform(conv_b_w_.value, cfg.width * 9, rng);
    init_uniform(dense_w_.value, cfg.width, rng);
  }

  std::vector<Parameter<float>*> parameters() {
    return {&conv_a_w_, &conv_a_b_, &conv_b_w_, &conv_b_b_, &dense_w_, &dense_b_};
  }

  Var logits(Tape<float>& tape, Var x) {
    Var h = ops::silu(tape, ops::conv(tape, x, tape.parameter(conv_a_w_), tape.parameter(conv_a_b_)));
    h = ops::silu(tape, ops::conv(tape, h, tape.parameter(conv_b_w_), tape.parameter(conv_b_b_)));
    return ops::dense(tape, ops::global_average_pool(tape, h), tape.parameter(dense_w_), tape.parameter(dense_b_));
  }

  std::vector<float> predict(const Tensor<float>& batch) {
    Tape<float> tape;
    const Tensor<float>& out = tape.value(logits(tape, tape.constant(batch)));
    return {out.begin(), out.end()};
  }

 private:
  Parameter<float> conv_a_w_, conv_a_b_, conv_b_w_, conv_b_b_, dense_w_, dense_b_;
};

struct ComparisonReport {
  std::string representation;
  std::size_t input_dimension = 0;
  double accuracy = 0.0;
  double train_seconds = 0.0;
  double infer_seconds = 0.0;
};

inline Record to_record(const ComparisonReport& r) {
  Record rec;
  rec.add("representation", r.representation);
  rec.add("dim", r.input_dimension);
  rec.add("accuracy", r.accuracy, 4);
  rec.add("train_s", r.train_seconds, 3);
  rec.add("infer_s", r.infer_seconds, 3);
  return rec;
}

// Trains a fresh classifier on features[0, n_train) and scores the rest.
inline ComparisonReport train_and_score(const std::vector<Tensor<float>>& features, const std::vector<int>& labels,
                                        std::size_t n_train, const ClassifierConfig& cfg, std::uint64_t seed,
                                        std::string name) {
  if (features.size() != labels.size() || n_train == 0 || n_train >= features.size()) {
    throw ParameterError("classifier: bad train/test split");
  }
  using Clock = std::chrono::steady_clock;
  const Shape fshape = features.front().shape();
  const std::size_t ch = fshape.at(0), pos = features.front().size() / ch;

  // Per-channel standardisation from the training split.
  std::vector<double> mean(ch, 0.0), sd(ch, 0.0);
  for (std::size_t i = 0; i < n_train; ++i)
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t p = 0; p < pos; ++p) mean[c] += features[i][c * pos + p];
  for (auto& m : mean) m /= static_cast<double>(n_train * pos);
  for (std::size_t i = 0; i < n_train; ++i)
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t p = 0; p < pos; ++p) sd[c] += std::pow(features[i][c * pos + p] - mean[c], 2);
  for (auto& s : sd) s = std::max(std::sqrt(s / static_cast<double>(n_train * pos)), 1e-6);
  auto batch_of = [&](const std::vector<std::size_t>& idx) {
    Shape bs = fshape;
    bs.insert(bs.begin(), idx.size());
    Tensor<float> b(bs);
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (std::size_t c = 0; c < ch; ++c)
        for (std::size_t p = 0; p < pos; ++p)
          b[(k * ch + c) * pos + p] = static_cast<float>((features[idx[k]][c * pos + p] - mean[c]) / sd[c]);
    return b;
  };

  ComparisonReport rep;
  rep.representation = std::move(name);
  rep.input_dimension = features.front().size();
  TextureClassifier net(ch, cfg, seed);
  Adam<float> opt(net.parameters(), AdamConfig{cfg.learning_rate});
  Rng rng(seed ^ 0xC1A551F1EDULL);
  std::vector<std::size_t> idx(cfg.batch);
  std::vector<int> y(cfg.batch);
  const auto t0 = Clock::now();
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (std::size_t k = 0; k < cfg.batch; ++k) {
      idx[k] = static_cast<std::size_t>(rng.below(n_train));
      y[k] = labels[idx[k]];
    }
    opt.zero_grad();
    Tape<float> tape;
    Var loss = ops::bce_with_logits(tape, net.logits(tape, tape.constant(batch_of(idx))), y);
    tape.backward(loss);
    opt.step();
  }
  const auto t1 = Clock::now();
  std::size_t hit = 0;
  constexpr std::size_t kEvalBatch = 64;
  for (std::size_t start = n_train; start < features.size(); start += kEvalBatch) {
    std::vector<std::size_t> ev;
    for (std::size_t i = start; i < std::min(start + kEvalBatch, features.size()); ++i) ev.push_back(i);
    const auto z = net.predict(batch_of(ev));
    for (std::size_t k = 0; k < ev.size(); ++k) hit += (z[k] > 0.0f) == (labels[ev[k]] == 1);
  }
  const auto t2 = Clock::now();
  rep.accuracy = static_cast<double>(hit) / static_cast<double>(features.size() - n_train);
  rep.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.infer_seconds = std::chrono::duration<double>(t2 - t1).count();
  return rep;
}

// Latent features against bicubic-downsampled pixels with the same element
// count. Returns {latent, downsample}.
inline std::pair<ComparisonReport, ComparisonReport> run_comparison(const TextureTask& task,
                                                                    const CodecModel<float>& model,
                                                                    const ClassifierConfig& cfg, std::uint64_t seed) {
  const CodecConfig& c = model.config();
  if (c.kind != Kind::k2D || c.channels != task.spec.channels) {
    throw ShapeError("compare: model " + to_string(c) + " does not take " + std::to_string(task.spec.channels) +
                     "-channel images");
  }
  // Equal element count: C_x * (n / f)^2 = C_z * (n / 2^J)^2.
  const double f = std::sqrt(static_cast<double>(c.channels) / static_cast<double>(c.latent_channels)) *
                   static_cast<double>(std::size_t{1} << c.levels);
  const auto factor = static_cast<std::size_t>(std::lround(f));
  const auto latent = featurize(task.images, FeatureMode::latent(model));
  const auto reduced = featurize(task.images, FeatureMode::downsample(std::max<std::size_t>(factor, 1)));
  check_dimensions_match(feature_dimension(latent), feature_dimension(reduced));
  auto a = train_and_score(latent, task.labels, task.train_count, cfg, seed, "latent");
  auto b = train_and_score(reduced, task.labels, task.train_count, cfg, seed, FeatureMode::downsample(factor).name());
  if (a.accuracy < cfg.min_accuracy && b.accuracy < cfg.min_accuracy) {
    throw InconclusiveError("compare: neither representation reached " + std::to_string(cfg.min_accuracy) +
                            " accuracy (latent " + std::to_string(a.accuracy) + ", " + b.representation + " " +
                            std::to_string(b.accuracy) + ")");
  }
  return {std::move(a), std::move(b)};
}

}  // namespace wlc
