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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <unsupported/Eigen/SpecialFunctions>

#include "wlc/codec/config.hpp"
#include "wlc/diffcore.hpp"
#include "wlc/normal.hpp"
#include "wlc/rng.hpp"
#include "wlc/wavelet.hpp"

namespace wlc {

enum class LatentDomain { kRaw, kCompanded };

// [C_z, spatial...] latent, tagged with the domain its values live in.
template <class T>
struct Latent {
  Tensor<T> values;
  LatentDomain domain = LatentDomain::kRaw;
};

// Signed 8-bit symbols in [-127, 127], same geometry as Latent.
using QuantizedLatent = Tensor<std::int8_t>;

inline constexpr int kQuantMax = 127;
inline constexpr double kCompandGain = 255.0;
inline constexpr double kDecompandEps = 1e-6;

namespace detail {

inline void check_scales(std::span<const double> sigma, std::size_t channels, const char* what) {
  if (sigma.size() != channels) {
    throw ShapeError(std::string(what) + ": " + std::to_string(sigma.size()) +
                     " scales for " + std::to_string(channels) + " channels");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ParameterError(std::string(what) + ": scale must be positive and finite, got " +
                           std::to_string(s));
    }
  }
}

template <class T>
void require_domain(const Latent<T>& l, LatentDomain want, const char* what) {
  if (l.domain != want) {
    throw StateError(std::string(what) + ": latent is in the " +
                     (l.domain == LatentDomain::kRaw ? "raw" : "companded") + " domain");
  }
}

inline double decompand_unit(double y) {
  const double p = std::clamp(y / kCompandGain + 0.5, kDecompandEps, 1.0 - kDecompandEps);
  return normal_quantile(p);
}

}  // namespace detail

// y = 255 (Phi(z / sigma_c) - 0.5), per channel (axis 0). Phi rounds to
// exactly 0 or 1 far in the tails, so the result is clamped one ulp inside
// +-127.5 to keep the interval open.
template <class T>
Latent<T> compand(const Latent<T>& z, std::span<const double> sigma) {
  detail::require_domain(z, LatentDomain::kRaw, "compand");
  const std::size_t ch = z.values.extent(0), pos = z.values.size() / std::max<std::size_t>(ch, 1);
  detail::check_scales(sigma, ch, "compand");
  Latent<T> y{Tensor<T>(z.values.shape()), LatentDomain::kCompanded};
  for (std::size_t c = 0; c < ch; ++c) {
    const double inv = 1.0 / sigma[c];
    const T* src = z.values.data() + c * pos;
    T* dst = y.values.data() + c * pos;
    if constexpr (std::is_same_v<T, float>) {
      // 255 (Phi(u) - 0.5) = 127.5 erf(u / sqrt 2); Eigen's vectorised float
      // erf is within a few ulp on [-4, 4] and saturates outside it.
      using Arr = Eigen::Array<float, Eigen::Dynamic, 1>;
      Eigen::Map<const Arr> in(src, static_cast<Eigen::Index>(pos));
      Eigen::Map<Arr> out(dst, static_cast<Eigen::Index>(pos));
      const float lim = compand_limit<float>();
      out = ((in * static_cast<float>(inv * std::numbers::sqrt2 / 2.0)).erf() *
             static_cast<float>(kCompandGain / 2.0))
                .max(-lim)
                .min(lim);
    } else {
      const T lim = compand_limit<T>();
      for (std::size_t p = 0; p < pos; ++p) {
        const T v = static_cast<T>(kCompandGain * (normal_cdf(src[p] * inv) - 0.5));
        dst[p] = std::clamp(v, -lim, lim);
      }
    }
  }
  return y;
}

// Round half away from zero, clamp to [-127, 127].
template <class T>
QuantizedLatent quantize(const Latent<T>& y) {
  detail::require_domain(y, LatentDomain::kCompanded, "quantize");
  QuantizedLatent q(y.values.shape());
  const T* src = y.values.data();
  std::int8_t* dst = q.data();
  const std::size_t n = q.size();
  if constexpr (std::is_same_v<T, float>) {
    // Integer extraction via the 1.5 * 2^23 bias keeps the loop branch free.
    for (std::size_t i = 0; i < n; ++i) {
      const float a = std::min(std::fabs(src[i]), float{kQuantMax});
      const float f = std::floor(a);
      const float r = std::min(f + static_cast<float>(a - f >= 0.5f), float{kQuantMax});
      const std::int32_t m = std::bit_cast<std::int32_t>(r + 12582912.0f) - 0x4B400000;
      const std::int32_t s = std::bit_cast<std::int32_t>(src[i]) >> 31;
      dst[i] = static_cast<std::int8_t>((m ^ s) - s);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const T a = std::min(std::fabs(src[i]), T{kQuantMax});
      const T f = std::floor(a);
      const T r = std::min(f + (a - f >= T{0.5} ? T{1} : T{0}), T{kQuantMax});
      dst[i] = static_cast<std::int8_t>(src[i] < T{0} ? -r : r);
    }
  }
  return q;
}

// sigma_c Phi^-1(clamp(y / 255 + 0.5, eps, 1 - eps)).
template <class T>
Latent<T> decompand(const Latent<T>& y, std::span<const double> sigma) {
  detail::require_domain(y, LatentDomain::kCompanded, "decompand");
  const std::size_t ch = y.values.extent(0), pos = y.values.size() / std::max<std::size_t>(ch, 1);
  detail::check_scales(sigma, ch, "decompand");
  Latent<T> z{Tensor<T>(y.values.shape()), LatentDomain::kRaw};
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t p = 0; p < pos; ++p) {
      const std::size_t i = c * pos + p;
      z.values[i] = static_cast<T>(sigma[c] * detail::decompand_unit(y.values[i]));
    }
  return z;
}

template <class T = float>
Latent<T> decompand(const QuantizedLatent& q, std::span<const double> sigma) {
  const std::size_t ch = q.extent(0), pos = q.size() / std::max<std::size_t>(ch, 1);
  detail::check_scales(sigma, ch, "decompand");
  // Only 255 distinct symbols: tabulate the unit quantiles once.
  double unit[2 * kQuantMax + 1];
  for (int s = -kQuantMax; s <= kQuantMax; ++s) unit[s + kQuantMax] = detail::decompand_unit(s);
  Latent<T> z{Tensor<T>(q.shape()), LatentDomain::kRaw};
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t p = 0; p < pos; ++p) {
      const std::size_t i = c * pos + p;
      const int s = std::clamp<int>(q[i], -kQuantMax, kQuantMax);
      z.values[i] = static_cast<T>(sigma[c] * unit[s + kQuantMax]);
    }
  return z;
}

// Training-time stand-in for quantize: adds U[-w/2, w/2] noise.
template <class T>
Latent<T> bottleneck_train(const Latent<T>& y, Rng& rng, double width = 1.0) {
  detail::require_domain(y, LatentDomain::kCompanded, "bottleneck_train");
  Latent<T> out = y;
  if (width == 0.0) return out;
  for (auto& v : out.values) v += static_cast<T>(rng.uniform(-0.5 * width, 0.5 * width));
  return out;
}

// Learned parts of the codec. The wavelet packet transform itself has no
// parameters.
template <class T = float>
class CodecModel {
 public:
  CodecModel() : CodecModel(CodecConfig{}) {}
  explicit CodecModel(const CodecConfig& config) : config_(config) {
    config_.validate();
    const std::size_t cs = config_.subband_channels(), cz = config_.latent_channels,
                      h = config_.hidden;
    analysis_weight = Parameter<T>("analysis.weight", Tensor<T>({cs, cz}));
    analysis_bias = Parameter<T>("analysis.bias", Tensor<T>({cz}));
    log_scale = Parameter<T>("compand.log_scale", Tensor<T>({cz}));
    entry_weight = Parameter<T>("synthesis.entry.weight", Tensor<T>({cz, h}));
    entry_bias = Parameter<T>("synthesis.entry.bias", Tensor<T>({h}));
    for (std::size_t i = 0; i < config_.depth; ++i) {
      blocks.emplace_back("synthesis.block" + std::to_string(i), h, config_.dims());
    }
    exit_weight = Parameter<T>("synthesis.exit.weight", Tensor<T>({h, cs}));
    exit_bias = Parameter<T>("synthesis.exit.bias", Tensor<T>({cs}));
  }

  // Uniform fan-in init for the analysis, entry and block weights. Scales
  // start at sigma = 1 and the exit layer at zero, so a fresh model decodes
  // every latent to the zero signal.
  void init(std::uint64_t seed) {
    Rng rng(seed);
    init_uniform(analysis_weight.value, config_.subband_channels(), rng);
    init_uniform(entry_weight.value, config_.latent_channels, rng);
    for (auto& b : blocks) b.init(rng);
  }

  const CodecConfig& config() const { return config_; }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out{&analysis_weight, &analysis_bias, &log_scale, &entry_weight,
                                   &entry_bias};
    for (auto& b : blocks)
      for (auto* p : b.parameters()) out.push_back(p);
    out.push_back(&exit_weight);
    out.push_back(&exit_bias);
    return out;
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (auto* p : parameters()) n += p->value.size();
    return n;
  }

  std::vector<double> scales() const {
    std::vector<double> s(log_scale.value.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(static_cast<double>(log_scale.value[i]));
    return s;
  }

  // ---- shapes ---------------------------------------------------------

  void check_signal(const Shape& s) const {
    const std::size_t want = static_cast<std::size_t>(config_.dims()) + 1;
    if (s.size() != want || s[0] != config_.channels) {
      throw ShapeError("codec: expected signal [" + std::to_string(config_.channels) +
                       (config_.dims() == 1 ? ", N]" : ", H, W]") + ", got " + shape_string(s));
    }
  }

  Shape latent_shape(const Shape& signal) const {
    check_signal(signal);
    Shape out = signal;
    out[0] = config_.latent_channels;
    for (std::size_t a = 1; a < out.size(); ++a) {
      if (out[a] % config_.block() != 0) {
        throw ShapeError("codec: extent " + std::to_string(out[a]) + " not divisible by 2^J = " +
                         std::to_string(config_.block()));
      }
      out[a] /= config_.block();
    }
    return out;
  }

  // ---- inference ------------------------------------------------------

  // Pre-companding latent: dense(wpt(x)). Linear in x.
  Latent<T> analyze(const Tensor<T>& signal) const {
    check_signal(signal.shape());
    Tensor<T> bands = wpt_analyze_planes(signal, config_.kind, config_.levels);
    Shape batched = bands.shape();
    batched.insert(batched.begin(), 1);
    bands.reshape(batched);
    Tensor<T> z = kernels::dense_forward(bands, analysis_weight.value, analysis_bias.value);
    z.reshape(Shape(z.shape().begin() + 1, z.shape().end()));
    return {std::move(z), LatentDomain::kRaw};
  }

  Tensor<T> synthesize(const Latent<T>& latent) const {
    detail::require_domain(latent, LatentDomain::kRaw, "synthesize");
    const Shape& s = latent.values.shape();
    if (s.size() != static_cast<std::size_t>(config_.dims()) + 1 || s[0] != config_.latent_channels) {
      throw ShapeError("synthesize: expected latent with " + std::to_string(config_.latent_channels) +
                       " channels and " + std::to_string(config_.dims()) + " spatial axes, got " +
                       shape_string(s));
    }
    Shape batched = s;
    batched.insert(batched.begin(), 1);
    Tensor<T> h = kernels::dense_forward(latent.values.reshaped(batched), entry_weight.value,
                                         entry_bias.value);
    for (const auto& b : blocks) h = b.apply(h);
    Tensor<T> bands = kernels::dense_forward(h, exit_weight.value, exit_bias.value);
    bands.reshape(Shape(bands.shape().begin() + 1, bands.shape().end()));
    return wpt_synthesize_planes(bands, config_.kind, config_.levels);
  }

  QuantizedLatent encode(const Tensor<T>& signal) const {
    return quantize(compand(analyze(signal), scales()));
  }

  Tensor<T> decode(const QuantizedLatent& q) const {
    return synthesize(decompand<T>(q, scales()));
  }

  // Reconstruction through continuous companded latents (no rounding).
  Tensor<T> reconstruct_continuous(const Tensor<T>& signal) const {
    const auto s = scales();
    return synthesize(decompand(compand(analyze(signal), s), s));
  }

  Tensor<T> reconstruct(const Tensor<T>& signal) const { return decode(encode(signal)); }

  // ---- differentiable graph --------------------------------------------

  // Loss for one batch [B, C_x, spatial...]. `noise`, when given, is added
  // to the companded latent and must have the latent's batched shape.
  Var training_loss(Tape<T>& tape, const Tensor<T>& batch, const Tensor<T>* noise) {
    Var x = tape.input(batch);
    Var xhat = reconstruction_graph(tape, x, noise);
    return ops::mse(tape, xhat, x);
  }

  Var reconstruction_graph(Tape<T>& tape, Var x, const Tensor<T>* noise) {
    Var bands = ops::wpt(tape, x, config_.kind, config_.levels);
    Var z = ops::dense(tape, bands, tape.parameter(analysis_weight), tape.parameter(analysis_bias));
    Var ls = tape.parameter(log_scale);
    Var y = ops::compand(tape, z, ls);
    if (noise) y = ops::add_constant(tape, y, *noise);
    Var zt = ops::decompand(tape, y, ls);
    Var h = ops::dense(tape, zt, tape.parameter(entry_weight), tape.parameter(entry_bias));
    for (auto& b : blocks) h = b.forward(tape, h);
    Var out = ops::dense(tape, h, tape.parameter(exit_weight), tape.parameter(exit_bias));
    return ops::iwpt(tape, out, config_.kind, config_.levels);
  }

  Parameter<T> analysis_weight, analysis_bias, log_scale;
  Parameter<T> entry_weight, entry_bias;
  std::vector<ResidualBlock<T>> blocks;
  Parameter<T> exit_weight, exit_bias;

 private:
  CodecConfig config_;
};

// Decodes an all-zero quantized latent of `extent` positions per axis whose
// channel `channel` holds `amplitude` at the centre position. One call per
// channel gives the gallery of learned synthesis patterns.
template <class T>
Tensor<T> probe_basis(const CodecModel<T>& model, std::size_t channel, int amplitude = 31,
                      std::size_t extent = 3) {
  const CodecConfig& c = model.config();
  if (channel >= c.latent_channels) {
    throw ParameterError("probe_basis: channel " + std::to_string(channel) + " out of range");
  }
  if (amplitude < -kQuantMax || amplitude > kQuantMax) {
    throw ParameterError("probe_basis: amplitude must be within [-127, 127]");
  }
  if (extent == 0) throw ParameterError("probe_basis: extent must be positive");
  Shape shape{c.latent_channels};
  for (int d = 0; d < c.dims(); ++d) shape.push_back(extent);
  QuantizedLatent q(shape);
  std::size_t centre = 0;
  for (int d = 0; d < c.dims(); ++d) centre = centre * extent + extent / 2;
  q[channel * shape_size(Shape(shape.begin() + 1, shape.end())) + centre] =
      static_cast<std::int8_t>(amplitude);
  return model.decode(q);
}

}  // namespace wlc
