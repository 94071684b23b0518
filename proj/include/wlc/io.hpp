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

// Signal ingestion: binary PGM/PPM (8-bit), 16-bit PCM WAV, raw float32.
// Images map to [-1, 1] as v / 127.5 - 1; audio as v / 32768.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "wlc/bytes.hpp"
#include "wlc/tensor.hpp"
#include "wlc/wavelet.hpp"

namespace wlc {

// ---- PNM -----------------------------------------------------------------

namespace detail {

// Reads one whitespace-delimited header token, skipping '#' comments.
inline std::uint32_t pnm_number(std::span<const std::uint8_t> b, std::size_t& pos, const char* field) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n' && b[pos] != '\r') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  std::uint64_t v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    if (v > 0xFFFFFFFFull) throw FormatError(std::string("pnm: ") + field + " too large", start);
    ++pos;
  }
  if (pos == start) throw FormatError(std::string("pnm: expected ") + field, start);
  return static_cast<std::uint32_t>(v);
}

inline float byte_to_unit(std::uint8_t v) { return static_cast<float>(v) / 127.5f - 1.0f; }

inline std::uint8_t unit_to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround((v + 1.0) * 127.5), 0L, 255L));
}

}  // namespace detail

// P5 -> [1, H, W], P6 -> [3, H, W].
inline Tensor<float> decode_pnm(std::span<const std::uint8_t> b) {
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '6')) {
    throw FormatError("pnm: expected P5 or P6 magic", 0);
  }
  const std::size_t channels = b[1] == '6' ? 3 : 1;
  std::size_t pos = 2;
  const std::uint32_t w = detail::pnm_number(b, pos, "width");
  const std::uint32_t h = detail::pnm_number(b, pos, "height");
  const std::size_t mpos = pos;
  const std::uint32_t maxval = detail::pnm_number(b, pos, "maxval");
  if (maxval != 255) throw FormatError("pnm: maxval " + std::to_string(maxval) + " unsupported (need 255)", mpos);
  if (w == 0 || h == 0) throw FormatError("pnm: zero extent", mpos);
  if (pos >= b.size() || !std::isspace(b[pos])) throw FormatError("pnm: missing separator after maxval", pos);
  ++pos;
  const std::size_t need = channels * static_cast<std::size_t>(w) * h;
  if (b.size() - pos < need) {
    throw FormatError("pnm: truncated payload, need " + std::to_string(need) + " bytes, have " +
                          std::to_string(b.size() - pos),
                      pos);
  }
  Tensor<float> out({channels, h, w});
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < plane; ++i)
    for (std::size_t c = 0; c < channels; ++c) out[c * plane + i] = detail::byte_to_unit(b[pos + i * channels + c]);
  return out;
}

inline Bytes encode_pnm(const Tensor<float>& image) {
  if (image.rank() != 3 || (image.extent(0) != 1 && image.extent(0) != 3)) {
    throw ShapeError("pnm: expected [1 or 3, H, W], got " + shape_string(image.shape()));
  }
  const std::size_t c = image.extent(0), h = image.extent(1), w = image.extent(2), plane = h * w;
  const std::string header = std::string(c == 3 ? "P6" : "P5") + "\n" + std::to_string(w) + " " +
                             std::to_string(h) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.resize(header.size() + c * plane);
  std::uint8_t* px = out.data() + header.size();
  for (std::size_t i = 0; i < plane; ++i)
    for (std::size_t k = 0; k < c; ++k) px[i * c + k] = detail::unit_to_byte(image[k * plane + i]);
  return out;
}

inline Tensor<float> load_image(const std::string& path) { return decode_pnm(read_file(path)); }
inline void write_image(const std::string& path, const Tensor<float>& image) {
  write_file(path, encode_pnm(image));
}

// ---- WAV -----------------------------------------------------------------

struct Audio {
  Tensor<float> samples;  // [C, N]
  std::uint32_t sample_rate = 44100;
};

inline Audio decode_wav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto riff = r.take(4, "RIFF tag");
  if (std::memcmp(riff.data(), "RIFF", 4) != 0) throw FormatError("wav: missing RIFF tag", 0);
  r.u32("RIFF size");
  auto wave = r.take(4, "WAVE tag");
  if (std::memcmp(wave.data(), "WAVE", 4) != 0) throw FormatError("wav: missing WAVE tag", 8);
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (r.remaining() > 0) {
    const std::size_t cpos = r.offset();
    auto id = r.take(4, "chunk id");
    const std::uint32_t size = r.u32("chunk size");
    if (std::memcmp(id.data(), "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("wav: fmt chunk too short", cpos);
      ByteReader f(r.take(size, "fmt chunk"));
      const std::uint16_t format = f.u16("format");
      channels = f.u16("channels");
      rate = f.u32("sample rate");
      f.u32("byte rate");
      f.u16("block align");
      bits = f.u16("bits per sample");
      if (format != 1) throw FormatError("wav: unsupported encoding " + std::to_string(format) + " (need PCM)", cpos + 8);
      if (bits != 16) throw FormatError("wav: unsupported sample width " + std::to_string(bits), cpos + 22);
      if (channels < 1 || channels > 2) throw FormatError("wav: unsupported channel count " + std::to_string(channels), cpos + 10);
      have_fmt = true;
    } else if (std::memcmp(id.data(), "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk", cpos);
      auto data = r.take(size, "data chunk");
      const std::size_t frame = 2u * channels;
      if (size % frame != 0) throw FormatError("wav: data size not a whole number of frames", cpos);
      const std::size_t n = size / frame;
      Audio a{Tensor<float>({channels, n}), rate};
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < channels; ++c) {
          const std::size_t o = i * frame + 2 * c;
          const auto v = static_cast<std::int16_t>(data[o] | (data[o + 1] << 8));
          a.samples[c * n + i] = static_cast<float>(v) / 32768.0f;
        }
      return a;
    } else {
      r.take(size + (size & 1), "chunk body");
    }
  }
  throw FormatError("wav: no data chunk", r.offset());
}

inline Bytes encode_wav(const Audio& a) {
  const Tensor<float>& s = a.samples;
  if (s.rank() != 2 || s.extent(0) < 1 || s.extent(0) > 2) {
    throw ShapeError("wav: expected [1 or 2, N], got " + shape_string(s.shape()));
  }
  const std::size_t ch = s.extent(0), n = s.extent(1);
  const auto data_size = static_cast<std::uint32_t>(n * ch * 2);
  ByteWriter w;
  w.raw(std::string_view("RIFF"));
  w.u32(36 + data_size);
  w.raw(std::string_view("WAVEfmt "));
  w.u32(16);
  w.u16(1);
  w.u16(static_cast<std::uint16_t>(ch));
  w.u32(a.sample_rate);
  w.u32(a.sample_rate * static_cast<std::uint32_t>(ch) * 2);
  w.u16(static_cast<std::uint16_t>(ch * 2));
  w.u16(16);
  w.raw(std::string_view("data"));
  w.u32(data_size);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < ch; ++c) {
      const long v = std::clamp(std::lround(static_cast<double>(s[c * n + i]) * 32768.0), -32768L, 32767L);
      w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
  return w.take();
}

inline Audio load_wav(const std::string& path) { return decode_wav(read_file(path)); }
inline void write_wav(const std::string& path, const Audio& a) { write_file(path, encode_wav(a)); }

// ---- raw float32 -----------------------------------------------------------

template <class T>
Bytes encode_raw_f32(const Tensor<T>& t) {
  ByteWriter w;
  for (const T& v : t) w.f32(static_cast<float>(v));
  return w.take();
}

inline Tensor<float> decode_raw_f32(std::span<const std::uint8_t> b, const Shape& shape) {
  if (b.size() != 4 * shape_size(shape)) {
    throw FormatError("raw f32: " + std::to_string(b.size()) + " bytes does not match shape " +
                          shape_string(shape),
                      0);
  }
  ByteReader r(b);
  Tensor<float> t(shape);
  for (auto& v : t) v = r.f32("value");
  return t;
}

// ---- padding ----------------------------------------------------------------

struct Padded {
  Tensor<float> signal;
  Shape original;  // extents before padding, including the channel axis
};

// Grows the spatial axes (all but axis 0) to `target` by whole-sample
// symmetric reflection at the far end of each axis.
inline Tensor<float> reflect_pad(const Tensor<float>& signal, const Shape& target) {
  const Shape& in = signal.shape();
  if (target.size() != in.size() || target[0] != in[0]) throw ShapeError("reflect_pad: target rank/channels mismatch");
  for (std::size_t a = 1; a < in.size(); ++a) {
    if (target[a] < in[a]) throw ShapeError("reflect_pad: target smaller than " + shape_string(in));
  }
  if (target == in) return signal;
  Tensor<float> res(target);
  const std::size_t rank = in.size();
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t flat = 0; flat < res.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      std::size_t i = idx[a];
      if (i >= in[a]) {
        i = static_cast<std::size_t>(detail::reflect(static_cast<std::ptrdiff_t>(i),
                                                     static_cast<std::ptrdiff_t>(in[a])));
      }
      src = src * in[a] + i;
    }
    res[flat] = signal[src];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < target[a]) break;
      idx[a] = 0;
    }
  }
  return res;
}

// Extends every spatial axis to the next multiple of 2^J.
inline Padded pad_to_divisible(const Tensor<float>& signal, int levels) {
  if (signal.rank() < 2) throw ShapeError("pad_to_divisible: need [C, spatial...]");
  if (levels < 0 || levels > 16) throw ParameterError("pad_to_divisible: levels must be in [0, 16]");
  const std::size_t block = std::size_t{1} << levels;
  Shape out = signal.shape();
  for (std::size_t a = 1; a < out.size(); ++a) out[a] = (out[a] + block - 1) / block * block;
  return {reflect_pad(signal, out), signal.shape()};
}

// Leading sub-block of `signal` with the given extents.
inline Tensor<float> crop(const Tensor<float>& signal, const Shape& extents) {
  if (extents.size() != signal.rank()) throw ShapeError("crop: rank mismatch");
  for (std::size_t a = 0; a < extents.size(); ++a) {
    if (extents[a] > signal.extent(a)) throw ShapeError("crop: extents exceed signal " + shape_string(signal.shape()));
  }
  if (extents == signal.shape()) return signal;
  Tensor<float> out(extents);
  const std::size_t rank = extents.size();
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < rank; ++a) src = src * signal.extent(a) + idx[a];
    out[flat] = signal[src];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < extents[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace wlc
