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

// Model checkpoint (.wlcm), all integers little-endian:
//
//   "WLCM"  version:u8
//   kind:u8 C_x:u16 J:u8 C_z:u16 hidden:u16 depth:u8 noise_width:f32
//   count:u32
//   count x { name_len:u16 name rank:u8 extents:u32[rank] values:f32[...] }

#include <map>
#include <string>

#include "wlc/bytes.hpp"
#include "wlc/codec/model.hpp"

namespace wlc {

inline constexpr char kCheckpointMagic[4] = {'W', 'L', 'C', 'M'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

template <class T>
Bytes save_checkpoint(CodecModel<T>& model) {
  const CodecConfig& c = model.config();
  ByteWriter w;
  w.raw(std::string_view(kCheckpointMagic, 4));
  w.u8(kCheckpointVersion);
  w.u8(static_cast<std::uint8_t>(c.kind));
  w.u16(static_cast<std::uint16_t>(c.channels));
  w.u8(static_cast<std::uint8_t>(c.levels));
  w.u16(static_cast<std::uint16_t>(c.latent_channels));
  w.u16(static_cast<std::uint16_t>(c.hidden));
  w.u8(static_cast<std::uint8_t>(c.depth));
  w.f32(static_cast<float>(c.noise_width));
  auto params = model.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (auto* p : params) {
    w.u16(static_cast<std::uint16_t>(p->name.size()));
    w.raw(p->name);
    w.u8(static_cast<std::uint8_t>(p->value.rank()));
    for (std::size_t e : p->value.shape()) w.u32(static_cast<std::uint32_t>(e));
    for (const T& v : p->value) w.f32(static_cast<float>(v));
  }
  return w.take();
}

template <class T = float>
CodecModel<T> load_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) throw FormatError("bad checkpoint magic", 0);
  const std::size_t vpos = r.offset();
  if (const auto v = r.u8("version"); v != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(v), vpos);
  }
  CodecConfig c;
  const std::size_t kpos = r.offset();
  const auto kind = r.u8("kind");
  if (kind != 1 && kind != 2) throw FormatError("bad kind " + std::to_string(kind), kpos);
  c.kind = static_cast<Kind>(kind);
  c.channels = r.u16("channels");
  c.levels = r.u8("levels");
  c.latent_channels = r.u16("latent_channels");
  c.hidden = r.u16("hidden");
  c.depth = r.u8("depth");
  c.noise_width = r.f32("noise_width");
  CodecModel<T> model = [&] {
    try {
      return CodecModel<T>(c);
    } catch (const ParameterError& e) {
      throw FormatError(std::string("invalid config: ") + e.what(), kpos);
    }
  }();

  std::map<std::string, Parameter<T>*> by_name;
  for (auto* p : model.parameters()) by_name[p->name] = p;
  const std::uint32_t count = r.u32("tensor count");
  if (count != by_name.size()) {
    throw FormatError("checkpoint has " + std::to_string(count) + " tensors, model expects " +
                          std::to_string(by_name.size()),
                      r.offset() - 4);
  }
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::size_t npos = r.offset();
    const auto len = r.u16("name length");
    auto name_bytes = r.take(len, "name");
    std::string name(name_bytes.begin(), name_bytes.end());
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("unknown tensor '" + name + "'", npos);
    Parameter<T>& p = *it->second;
    const std::size_t rank = r.u8("rank");
    Shape shape(rank);
    for (auto& e : shape) e = r.u32("extent");
    if (shape != p.value.shape()) {
      throw FormatError("tensor '" + name + "' has shape " + shape_string(shape) + ", expected " +
                            shape_string(p.value.shape()),
                        npos);
    }
    for (auto& v : p.value) v = static_cast<T>(r.f32("tensor values"));
    by_name.erase(it);
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint", r.offset());
  return model;
}

template <class T>
void save_checkpoint_file(const std::string& path, CodecModel<T>& model) {
  write_file(path, save_checkpoint(model));
}

template <class T = float>
CodecModel<T> load_checkpoint_file(const std::string& path) {
  const Bytes b = read_file(path);
  return load_checkpoint<T>(b);
}

}  // namespace wlc
