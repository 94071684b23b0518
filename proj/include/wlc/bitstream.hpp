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

// Order-0 rANS over signed 8-bit symbols with static 12-bit tables, and the
// .wllc container. Layout (little-endian):
//
//   "WLLC" version:u8 kind:u8 J:u8 C_x:u16 C_z:u16
//   original extents u32[d]  padded extents u32[d]
//   sigma f32[C_z]
//   C_z x table   { first:u8 last:u8 count:varint[last - first + 1] }
//   C_z x payload { length:u32 bytes[length] }
//
// Table symbols are indexed as value + 128. Each channel codes the latent
// plane in row-major order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wlc/bytes.hpp"
#include "wlc/tensor.hpp"
#include "wlc/wavelet.hpp"

namespace wlc {

struct CodingError : Error {
  using Error::Error;
};

inline constexpr std::uint32_t kTableBits = 12;
inline constexpr std::uint32_t kTableTotal = 1u << kTableBits;  // 4096
inline constexpr std::uint32_t kRansLow = 1u << 23;

inline std::size_t symbol_index(std::int8_t v) { return static_cast<std::size_t>(static_cast<int>(v) + 128); }
inline std::int8_t index_symbol(std::size_t i) { return static_cast<std::int8_t>(static_cast<int>(i) - 128); }

struct FreqTable {
  std::array<std::uint32_t, 256> count{};  // indexed by value + 128
  std::array<std::uint32_t, 257> cumulative() const {
    std::array<std::uint32_t, 257> c{};
    for (std::size_t i = 0; i < 256; ++i) c[i + 1] = c[i] + count[i];
    return c;
  }
  std::uint32_t of(std::int8_t v) const { return count[symbol_index(v)]; }
  friend bool operator==(const FreqTable&, const FreqTable&) = default;
};

// Scales the histogram to total 4096: floor of the exact share (at least 1
// for any present symbol), then leftover units go to the largest fractional
// remainders, ties to the lower symbol. Any excess created by the floor of 1
// is taken back from the largest counts.
inline FreqTable build_freq_table(std::span<const std::int8_t> symbols) {
  if (symbols.empty()) throw ParameterError("build_freq_table: empty input");
  std::array<std::uint64_t, 256> hist{};
  for (auto v : symbols) ++hist[symbol_index(v)];
  const std::uint64_t n = symbols.size();
  FreqTable t;
  std::array<std::uint64_t, 256> rem{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < 256; ++i) {
    if (!hist[i]) continue;
    const std::uint64_t scaled = hist[i] * kTableTotal;
    t.count[i] = static_cast<std::uint32_t>(std::max<std::uint64_t>(scaled / n, 1));
    rem[i] = scaled / n ? scaled % n : 0;
    assigned += t.count[i];
  }
  std::vector<std::size_t> order(256);
  std::iota(order.begin(), order.end(), 0);
  if (assigned < static_cast<std::int64_t>(kTableTotal)) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < static_cast<std::int64_t>(kTableTotal); k = (k + 1) % 256) {
      if (!hist[order[k]]) continue;
      ++t.count[order[k]];
      ++assigned;
    }
  }
  while (assigned > static_cast<std::int64_t>(kTableTotal)) {
    const auto it = std::max_element(t.count.begin(), t.count.end());
    --*it;
    --assigned;
  }
  return t;
}

// The returned stream starts with the final 32-bit coder state. An empty
// sequence codes to an empty stream.
inline Bytes rans_encode(std::span<const std::int8_t> symbols, const FreqTable& table) {
  if (symbols.empty()) return {};
  const auto cum = table.cumulative();
  if (cum[256] != kTableTotal) throw CodingError("rans_encode: table does not sum to 4096");
  Bytes rev;
  rev.reserve(symbols.size() / 2 + 8);
  std::uint32_t x = kRansLow;
  for (std::size_t i = symbols.size(); i-- > 0;) {
    const std::size_t s = symbol_index(symbols[i]);
    const std::uint32_t f = table.count[s];
    if (f == 0) {
      throw CodingError("rans_encode: symbol " + std::to_string(symbols[i]) + " at position " +
                        std::to_string(i) + " has zero frequency");
    }
    const std::uint32_t x_max = ((kRansLow >> kTableBits) << 8) * f;
    while (x >= x_max) {
      rev.push_back(static_cast<std::uint8_t>(x & 0xFF));
      x >>= 8;
    }
    x = ((x / f) << kTableBits) + (x % f) + cum[s];
  }
  for (int k = 0; k < 4; ++k) {
    rev.push_back(static_cast<std::uint8_t>(x & 0xFF));
    x >>= 8;
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

// Rejects streams that run dry, leave bytes unread, or do not unwind to the
// encoder's initial state, so truncation never passes silently.
inline std::vector<std::int8_t> rans_decode(std::span<const std::uint8_t> stream, const FreqTable& table,
                                            std::size_t n) {
  std::vector<std::int8_t> out(n);
  if (n == 0) {
    if (!stream.empty()) throw FormatError("rans_decode: non-empty stream for zero symbols", 0);
    return out;
  }
  const auto cum = table.cumulative();
  if (cum[256] != kTableTotal) throw FormatError("rans_decode: table does not sum to 4096", 0);
  std::array<std::uint8_t, kTableTotal> slot_symbol{};
  for (std::size_t s = 0; s < 256; ++s)
    for (std::uint32_t k = cum[s]; k < cum[s + 1]; ++k) slot_symbol[k] = static_cast<std::uint8_t>(s);

  if (stream.size() < 4) throw FormatError("rans_decode: stream shorter than the coder state", stream.size());
  std::uint32_t x = 0;
  for (std::size_t k = 0; k < 4; ++k) x = (x << 8) | stream[k];
  std::size_t pos = 4;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t slot = x & (kTableTotal - 1);
    const std::size_t s = slot_symbol[slot];
    out[i] = index_symbol(s);
    x = table.count[s] * (x >> kTableBits) + slot - cum[s];
    while (x < kRansLow) {
      if (pos >= stream.size()) {
        throw FormatError("rans_decode: stream exhausted after " + std::to_string(i + 1) + " of " +
                              std::to_string(n) + " symbols",
                          pos);
      }
      x = (x << 8) | stream[pos++];
    }
  }
  if (pos != stream.size()) throw FormatError("rans_decode: unread bytes after last symbol", pos);
  if (x != kRansLow) throw FormatError("rans_decode: final state mismatch (corrupt stream)", pos);
  return out;
}

// ---- container -----------------------------------------------------------

inline constexpr char kContainerMagic[4] = {'W', 'L', 'L', 'C'};
inline constexpr std::uint8_t kContainerVersion = 1;

struct ContainerHeader {
  Kind kind = Kind::k2D;
  int levels = 3;
  std::size_t channels = 3;         // C_x
  Shape original;                   // spatial extents before padding
  Shape padded;                     // spatial extents fed to the transform
  std::vector<float> sigma;         // per latent channel; size C_z

  std::size_t latent_channels() const { return sigma.size(); }
  Shape latent_shape() const {
    Shape s{latent_channels()};
    for (std::size_t e : padded) s.push_back(e >> levels);
    return s;
  }
  friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

struct Container {
  ContainerHeader header;
  Tensor<std::int8_t> latent;  // [C_z, padded / 2^J ...]
};

namespace detail {

inline void check_header(const ContainerHeader& h) {
  const std::size_t d = static_cast<std::size_t>(spatial_dims(h.kind));
  if (h.original.size() != d || h.padded.size() != d) throw ShapeError("container: extents do not match kind");
  if (h.levels < 0 || h.levels > 16) throw ParameterError("container: J out of range");
  if (h.channels == 0 || h.channels > 0xFFFF) throw ParameterError("container: C_x out of range");
  if (h.sigma.empty() || h.sigma.size() > 0xFFFF) throw ParameterError("container: C_z out of range");
  for (std::size_t a = 0; a < d; ++a) {
    if (h.original[a] == 0 || h.original[a] > h.padded[a] || h.padded[a] > 0xFFFFFFFFu ||
        h.padded[a] % (std::size_t{1} << h.levels) != 0) {
      throw ShapeError("container: inconsistent extents");
    }
  }
  if (shape_size(h.latent_shape()) > (std::size_t{1} << 31)) throw ShapeError("container: latent too large");
  for (float s : h.sigma) {
    if (!(s > 0.0f) || !std::isfinite(s)) throw ParameterError("container: sigma must be positive and finite");
  }
}

inline void write_table(ByteWriter& w, const FreqTable& t) {
  std::size_t first = 0, last = 255;
  while (first < 256 && t.count[first] == 0) ++first;
  while (last > first && t.count[last] == 0) --last;
  w.u8(static_cast<std::uint8_t>(first));
  w.u8(static_cast<std::uint8_t>(last));
  for (std::size_t i = first; i <= last; ++i) w.varint(t.count[i]);
}

inline FreqTable read_table(ByteReader& r) {
  const std::size_t pos = r.offset();
  const std::size_t first = r.u8("table first symbol");
  const std::size_t last = r.u8("table last symbol");
  if (last < first) throw FormatError("table range is reversed", pos);
  FreqTable t;
  std::uint32_t sum = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const std::uint32_t c = r.varint("table count");
    if (c > kTableTotal) throw FormatError("table count exceeds 4096", pos);
    t.count[i] = c;
    sum += c;
  }
  if (sum != kTableTotal) throw FormatError("table sums to " + std::to_string(sum) + ", expected 4096", pos);
  return t;
}

}  // namespace detail

inline Bytes write_container(const Container& c) {
  const ContainerHeader& h = c.header;
  detail::check_header(h);
  require_same_shape(c.latent.shape(), h.latent_shape(), "write_container");
  ByteWriter w;
  w.raw(std::string_view(kContainerMagic, 4));
  w.u8(kContainerVersion);
  w.u8(static_cast<std::uint8_t>(h.kind));
  w.u8(static_cast<std::uint8_t>(h.levels));
  w.u16(static_cast<std::uint16_t>(h.channels));
  w.u16(static_cast<std::uint16_t>(h.latent_channels()));
  for (std::size_t e : h.original) w.u32(static_cast<std::uint32_t>(e));
  for (std::size_t e : h.padded) w.u32(static_cast<std::uint32_t>(e));
  for (float s : h.sigma) w.f32(s);

  const std::size_t plane = c.latent.size() / h.latent_channels();
  std::vector<FreqTable> tables;
  for (std::size_t k = 0; k < h.latent_channels(); ++k) {
    tables.push_back(build_freq_table({c.latent.data() + k * plane, plane}));
    detail::write_table(w, tables.back());
  }
  for (std::size_t k = 0; k < h.latent_channels(); ++k) {
    const Bytes payload = rans_encode({c.latent.data() + k * plane, plane}, tables[k]);
    w.u32(static_cast<std::uint32_t>(payload.size()));
    w.raw(payload);
  }
  return w.take();
}

inline Container read_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kContainerMagic, 4) != 0) throw FormatError("bad container magic", 0);
  if (const auto v = r.u8("version"); v != kContainerVersion) {
    throw FormatError("unsupported container version " + std::to_string(v), 4);
  }
  Container c;
  ContainerHeader& h = c.header;
  const std::size_t kpos = r.offset();
  const auto kind = r.u8("kind");
  if (kind != 1 && kind != 2) throw FormatError("bad kind " + std::to_string(kind), kpos);
  h.kind = static_cast<Kind>(kind);
  h.levels = r.u8("J");
  h.channels = r.u16("C_x");
  const std::size_t cz = r.u16("C_z");
  const std::size_t d = static_cast<std::size_t>(spatial_dims(h.kind));
  for (std::size_t a = 0; a < d; ++a) h.original.push_back(r.u32("original extent"));
  for (std::size_t a = 0; a < d; ++a) h.padded.push_back(r.u32("padded extent"));
  h.sigma.resize(cz);
  for (auto& s : h.sigma) s = r.f32("sigma");
  try {
    detail::check_header(h);
  } catch (const Error& e) {
    throw FormatError(std::string("invalid header: ") + e.what(), kpos);
  }
  const Shape ls = h.latent_shape();
  const std::size_t plane = shape_size(ls) / cz;
  std::vector<FreqTable> tables;
  for (std::size_t k = 0; k < cz; ++k) tables.push_back(detail::read_table(r));
  c.latent = Tensor<std::int8_t>(ls);
  for (std::size_t k = 0; k < cz; ++k) {
    const std::uint32_t len = r.u32("payload length");
    const std::size_t base = r.offset();
    auto payload = r.take(len, "payload");
    try {
      const auto sym = rans_decode(payload, tables[k], plane);
      std::copy(sym.begin(), sym.end(), c.latent.data() + k * plane);
    } catch (const FormatError& e) {
      throw FormatError("channel " + std::to_string(k) + ": " + e.reason, base + e.offset);
    }
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after container", r.offset());
  return c;
}

}  // namespace wlc
