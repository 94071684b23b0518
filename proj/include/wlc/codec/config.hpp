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
#include <cstdint>
#include <string>

#include "wlc/keyvalue.hpp"
#include "wlc/wavelet.hpp"

namespace wlc {

struct CodecConfig {
  Kind kind = Kind::k2D;
  std::size_t channels = 3;         // C_x
  int levels = 3;                   // J
  std::size_t latent_channels = 48; // C_z
  std::size_t hidden = 64;          // decoder width
  std::size_t depth = 4;            // residual blocks in the decoder
  double noise_width = 1.0;         // training noise, in quantizer steps

  int dims() const { return spatial_dims(kind); }
  std::size_t block() const { return std::size_t{1} << levels; }
  std::size_t subband_channels() const {
    return channels << (static_cast<std::size_t>(levels) * static_cast<std::size_t>(dims()));
  }
  double dimensionality_reduction() const {
    return static_cast<double>(subband_channels()) / static_cast<double>(latent_channels);
  }
  std::size_t analysis_parameter_count() const {
    return (subband_channels() + 1) * latent_channels;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw ParameterError("codec config: " + m); };
    if (kind != Kind::k1D && kind != Kind::k2D) fail("kind must be 1D or 2D");
    if (channels == 0 || channels > 0xFFFF) fail("channels must be in [1, 65535]");
    if (levels < 0 || levels > 16) fail("levels must be in [0, 16]");
    if (static_cast<std::size_t>(levels) * static_cast<std::size_t>(dims()) > 24) {
      fail("levels too large for this dimensionality");
    }
    if (latent_channels == 0 || latent_channels > 0xFFFF) fail("latent_channels must be in [1, 65535]");
    if (latent_channels > subband_channels()) {
      fail("latent_channels " + std::to_string(latent_channels) + " exceeds subband channels " +
           std::to_string(subband_channels()));
    }
    if (hidden == 0 || hidden > 0xFFFF) fail("hidden must be in [1, 65535]");
    if (depth > 0xFF) fail("depth must be at most 255");
    if (!std::isfinite(noise_width) || noise_width < 0.0) fail("noise_width must be finite and >= 0");
  }
};

// Optimisation settings for train().
struct TrainOptions {
  std::size_t steps = 2000;
  std::size_t batch = 16;
  double learning_rate = 1e-4;
  // Cosine decay from learning_rate down to learning_rate * final_lr_fraction.
  double final_lr_fraction = 0.1;
  std::uint64_t seed = 0;
  std::size_t patch = 96;  // patch extent per spatial axis
  std::size_t log_every = 0;
  // Start the analysis layer from the principal subband directions of the
  // training patches instead of the random draw.
  bool pca_init = true;
  // Initial companding scale as a multiple of each component's deviation.
  double pca_sigma_multiple = 4.0;
};

inline Kind parse_kind(const std::string& s) {
  if (s == "image" || s == "2d" || s == "2D") return Kind::k2D;
  if (s == "audio" || s == "1d" || s == "1D") return Kind::k1D;
  throw ConfigError("unknown kind '" + s + "' (expected image or audio)");
}

inline std::string kind_name(Kind kind) { return kind == Kind::k2D ? "image" : "audio"; }

inline CodecConfig codec_config_from(const KeyValues& kv) {
  CodecConfig c;
  c.kind = parse_kind(kv.get("kind", "image"));
  c.channels = kv.number<std::size_t>("channels", c.kind == Kind::k2D ? 3 : 2);
  c.levels = kv.number<int>("levels", c.kind == Kind::k2D ? 3 : 8);
  c.latent_channels = kv.number<std::size_t>("latent_channels", c.latent_channels);
  c.hidden = kv.number<std::size_t>("hidden", c.hidden);
  c.depth = kv.number<std::size_t>("depth", c.depth);
  c.noise_width = kv.number<double>("noise_width", c.noise_width);
  c.validate();
  return c;
}

inline TrainOptions train_options_from(const KeyValues& kv) {
  TrainOptions t;
  t.steps = kv.number<std::size_t>("steps", t.steps);
  t.batch = kv.number<std::size_t>("batch", t.batch);
  t.learning_rate = kv.number<double>("learning_rate", t.learning_rate);
  t.final_lr_fraction = kv.number<double>("final_lr_fraction", t.final_lr_fraction);
  t.seed = kv.number<std::uint64_t>("seed", t.seed);
  t.patch = kv.number<std::size_t>("patch", t.patch);
  t.pca_init = kv.number<int>("pca_init", t.pca_init ? 1 : 0) != 0;
  t.pca_sigma_multiple = kv.number<double>("pca_sigma_multiple", t.pca_sigma_multiple);
  return t;
}

inline std::string to_string(const CodecConfig& c) {
  Record r;
  r.add("kind", kind_name(c.kind))
      .add("channels", c.channels)
      .add("levels", c.levels)
      .add("latent_channels", c.latent_channels)
      .add("hidden", c.hidden)
      .add("depth", c.depth)
      .add("noise_width", c.noise_width, 3);
  return r.str();
}

}  // namespace wlc
