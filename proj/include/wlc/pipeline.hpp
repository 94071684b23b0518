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

// Signal <-> container for a trained model, with padding to 2^J and
// cropping back to the original extents.

#include <string>
#include <vector>

#include "wlc/bitstream.hpp"
#include "wlc/codec.hpp"
#include "wlc/datasets.hpp"
#include "wlc/io.hpp"
#include "wlc/keyvalue.hpp"
#include "wlc/metrics.hpp"

namespace wlc {

template <class T>
Container encode_container(const CodecModel<T>& model, const Tensor<float>& signal) {
  const CodecConfig& c = model.config();
  model.check_signal(signal.shape());
  const Padded p = pad_to_divisible(signal, static_cast<int>(c.levels));
  Container out;
  out.header.kind = c.kind;
  out.header.levels = static_cast<int>(c.levels);
  out.header.channels = c.channels;
  out.header.original.assign(p.original.begin() + 1, p.original.end());
  out.header.padded.assign(p.signal.shape().begin() + 1, p.signal.shape().end());
  for (double s : model.scales()) out.header.sigma.push_back(static_cast<float>(s));
  if constexpr (std::is_same_v<T, float>) {
    out.latent = model.encode(p.signal);
  } else {
    out.latent = model.encode(p.signal.template cast<T>());
  }
  return out;
}

template <class T>
Bytes compress(const CodecModel<T>& model, const Tensor<float>& signal) {
  return write_container(encode_container(model, signal));
}

// The container's own sigma values drive decompanding; its geometry must
// match the model.
template <class T>
Tensor<float> decode_container(const CodecModel<T>& model, const Container& container) {
  const CodecConfig& c = model.config();
  const ContainerHeader& h = container.header;
  if (h.kind != c.kind || h.levels != static_cast<int>(c.levels) || h.channels != c.channels ||
      h.latent_channels() != c.latent_channels) {
    throw ShapeError("container (" + std::string(kind_name(h.kind)) + ", J=" + std::to_string(h.levels) +
                     ", C_x=" + std::to_string(h.channels) + ", C_z=" + std::to_string(h.latent_channels()) +
                     ") does not match model " + to_string(c));
  }
  const std::vector<double> sigma(h.sigma.begin(), h.sigma.end());
  Tensor<T> full = model.synthesize(decompand<T>(container.latent, sigma));
  Shape original{c.channels};
  original.insert(original.end(), h.original.begin(), h.original.end());
  if constexpr (std::is_same_v<T, float>) {
    return crop(full, original);
  } else {
    return crop(full.template cast<float>(), original);
  }
}

template <class T>
Tensor<float> decompress(const CodecModel<T>& model, std::span<const std::uint8_t> bytes) {
  return decode_container(model, read_container(bytes));
}

// Float outputs clipped to the nominal sample range.
inline Tensor<float> clip_unit(Tensor<float> s) {
  for (auto& v : s) v = std::clamp(v, -1.0f, 1.0f);
  return s;
}

// A config file holds the codec geometry and its training settings side by
// side; `crop_pool` is the number of random training crops drawn up front.
struct ModelSpec {
  CodecConfig codec;
  TrainOptions train;
  std::size_t crop_pool = 512;
};

inline ModelSpec model_spec_from(const KeyValues& kv) {
  ModelSpec m;
  m.codec = codec_config_from(kv);
  m.train = train_options_from(kv);
  m.crop_pool = kv.number<std::size_t>("crop_pool", m.crop_pool);
  if (m.crop_pool == 0) throw ConfigError("crop_pool must be positive");
  kv.reject_unused();
  if (m.train.patch % m.codec.block()) {
    throw ConfigError("patch " + std::to_string(m.train.patch) + " is not a multiple of 2^J = " +
                      std::to_string(m.codec.block()));
  }
  return m;
}

inline ModelSpec load_model_spec(const std::string& path) { return model_spec_from(KeyValues::load(path)); }

inline std::vector<Tensor<float>> training_crops(const ModelSpec& spec, const std::vector<Tensor<float>>& signals,
                                                 const std::vector<std::size_t>& indices) {
  Rng rng(spec.train.seed ^ 0xC20B5ULL);
  const Shape extents(static_cast<std::size_t>(spec.codec.dims()), spec.train.patch);
  return random_crops(signals, indices, spec.crop_pool, extents, rng);
}

inline CodecModel<float> train_model(const ModelSpec& spec, const std::vector<Tensor<float>>& signals,
                                     const std::vector<std::size_t>& indices, const TrainLogger& log = {}) {
  return train(spec.codec, training_crops(spec, signals, indices), spec.train, log).model;
}

// Per-signal evaluation through the full container path.
struct EvalRow {
  QualityReport quality;
  std::size_t container_bytes = 0;
  double compression_ratio = 0.0;
  double dimensionality_reduction = 0.0;
};

inline EvalRow evaluate(const CodecModel<float>& model, const Tensor<float>& signal) {
  const Bytes bytes = compress(model, signal);
  const Tensor<float> back = clip_unit(decompress(model, bytes));
  EvalRow r;
  r.quality = quality(signal, back);
  r.container_bytes = bytes.size();
  r.compression_ratio = compression_ratio(signal.shape(), bytes.size());
  r.dimensionality_reduction = model.config().dimensionality_reduction();
  return r;
}

inline Record to_record(const EvalRow& r) {
  Record rec = to_record(r.quality);
  rec.add("bytes", r.container_bytes).add("cr", r.compression_ratio, 4).add("dr", r.dimensionality_reduction, 4);
  return rec;
}

}  // namespace wlc
