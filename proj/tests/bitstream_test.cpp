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

#include "wlc/bitstream.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <string>

#include "fuzz.hpp"
#include "oracles.hpp"

namespace wlc {
namespace {

std::uint32_t table_sum(const FreqTable& t) { return std::accumulate(t.count.begin(), t.count.end(), 0u); }

TEST(FreqTable, AllZero) {
  const std::vector<std::int8_t> s(1000, 0);
  const FreqTable t = build_freq_table(s);
  EXPECT_EQ(t.of(0), 4096u);
  EXPECT_EQ(table_sum(t), 4096u);
}

TEST(FreqTable, EqualPair) {
  std::vector<std::int8_t> s;
  for (int i = 0; i < 500; ++i) s.insert(s.end(), {-3, 7});
  const FreqTable t = build_freq_table(s);
  EXPECT_EQ(t.of(-3), 2048u);
  EXPECT_EQ(t.of(7), 2048u);
}

TEST(FreqTable, SkewedPair) {
  std::vector<std::int8_t> s(900, 1);
  s.insert(s.end(), 100, -1);
  const FreqTable t = build_freq_table(s);
  EXPECT_NEAR(static_cast<double>(t.of(1)), 3686.0, 1.0);
  EXPECT_NEAR(static_cast<double>(t.of(-1)), 410.0, 1.0);
  EXPECT_EQ(table_sum(t), 4096u);
}

TEST(FreqTable, RareSymbolsKeepOneCount) {
  Rng rng(1);
  std::vector<std::int8_t> s(100000, 0);
  for (int v = -127; v <= 127; ++v) s[static_cast<std::size_t>(v + 127)] = static_cast<std::int8_t>(v);
  const FreqTable t = build_freq_table(s);
  for (int v = -127; v <= 127; ++v) EXPECT_GE(t.of(static_cast<std::int8_t>(v)), 1u);
  EXPECT_EQ(t.of(-128), 0u);
  EXPECT_EQ(table_sum(t), 4096u);
  EXPECT_THROW(build_freq_table(std::vector<std::int8_t>{}), ParameterError);
}

TEST(Rans, UniformBytesAreIncompressible) {
  Rng rng(2);
  std::vector<std::int8_t> s(4096);
  for (auto& v : s) v = static_cast<std::int8_t>(static_cast<int>(rng.below(256)) - 128);
  const Bytes b = rans_encode(s, build_freq_table(s));
  EXPECT_GE(b.size(), 4096u - 64u);
  EXPECT_EQ(rans_decode(b, build_freq_table(s), s.size()), s);
}

TEST(Rans, ConstantSequenceIsTiny) {
  const std::vector<std::int8_t> s(4096, 42);
  const Bytes b = rans_encode(s, build_freq_table(s));
  EXPECT_LT(b.size(), 32u);
}

TEST(Rans, PeakedChannelNearEntropyBound) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::int8_t> s(1024 + rng.below(8192));
    fuzz::fill_channel(s.data(), s.size(), rng);
    const Bytes b = rans_encode(s, build_freq_table(s));
    EXPECT_LE(static_cast<double>(b.size()), 1.02 * oracle::entropy_bytes(s) + 16.0) << trial;
  }
}

TEST(Rans, FuzzedRoundTrips) {
  Rng rng(4);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::int8_t> s(1 + rng.below(300));
    fuzz::fill_channel(s.data(), s.size(), rng);
    const FreqTable t = build_freq_table(s);
    ASSERT_EQ(rans_decode(rans_encode(s, t), t, s.size()), s) << trial;
  }
}

TEST(Rans, EmptyAndErrors) {
  const FreqTable t = build_freq_table(std::vector<std::int8_t>{0});
  EXPECT_TRUE(rans_encode({}, t).empty());
  EXPECT_TRUE(rans_decode({}, t, 0).empty());
  EXPECT_THROW(rans_encode(std::vector<std::int8_t>{1}, t), CodingError);

  Rng rng(5);
  std::vector<std::int8_t> s(2000);
  fuzz::fill_channel(s.data(), s.size(), rng);
  for (auto& v : s) v = static_cast<std::int8_t>(v % 9);
  const FreqTable ts = build_freq_table(s);
  const Bytes b = rans_encode(s, ts);
  EXPECT_THROW(rans_decode(std::span(b).first(b.size() - 1), ts, s.size()), FormatError);
  EXPECT_THROW(rans_decode(std::span(b).first(3), ts, s.size()), FormatError);
  Bytes longer = b;
  longer.push_back(0);
  EXPECT_THROW(rans_decode(longer, ts, s.size()), FormatError);
}

TEST(Rans, EveryTruncationIsRejected) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int8_t> s(1 + rng.below(500));
    fuzz::fill_channel(s.data(), s.size(), rng);
    const FreqTable t = build_freq_table(s);
    const Bytes b = rans_encode(s, t);
    for (std::size_t cut = 0; cut < b.size(); ++cut) {
      ASSERT_THROW(rans_decode(std::span(b).first(cut), t, s.size()), FormatError) << trial << " " << cut;
    }
  }
}

Container image_container() {
  Container c;
  c.header.kind = Kind::k2D;
  c.header.levels = 3;
  c.header.channels = 3;
  c.header.original = {256, 256};
  c.header.padded = {256, 256};
  for (int k = 0; k < 12; ++k) c.header.sigma.push_back(0.5f + 0.25f * static_cast<float>(k));
  c.latent = Tensor<std::int8_t>(c.header.latent_shape());
  Rng rng(7);
  for (std::size_t k = 0; k < 12; ++k) fuzz::fill_channel(c.latent.data() + k * 1024, 1024, rng);
  return c;
}

TEST(Container, HeaderFieldEcho) {
  const Container c = image_container();
  const Bytes b = write_container(c);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "WLLC");
  const Container back = read_container(b);
  EXPECT_EQ(back.header.original, (Shape{256, 256}));
  EXPECT_EQ(back.header.sigma.size(), 12u);
  EXPECT_EQ(back.header, c.header);
  EXPECT_EQ(back.latent, c.latent);
  EXPECT_EQ(back.latent.shape(), (Shape{12, 32, 32}));
}

TEST(Container, DeterministicBytes) {
  EXPECT_EQ(write_container(image_container()), write_container(image_container()));
}

TEST(Container, FuzzedRoundTrips) {
  Rng rng(8);
  for (int trial = 0; trial < 10000; ++trial) {
    const Container c = fuzz::random_container(rng);
    const Container back = read_container(write_container(c));
    ASSERT_EQ(back.header, c.header) << trial;
    ASSERT_EQ(back.latent, c.latent) << trial;
  }
}

TEST(Container, RejectsCorruptHeaders) {
  const Bytes good = write_container(image_container());
  auto expect_offset = [](Bytes b, std::size_t offset) {
    try {
      read_container(b);
      ADD_FAILURE() << "accepted corrupt container";
    } catch (const FormatError& e) {
      EXPECT_EQ(e.offset, offset) << e.what();
    }
  };
  Bytes b = good;
  b[0] = 'X';
  expect_offset(b, 0);
  b = good;
  b[4] = 9;
  expect_offset(b, 4);
  b = good;
  b[5] = 3;
  expect_offset(b, 5);
  b = good;
  b.push_back(0);
  expect_offset(b, good.size());
  b = good;
  b[11] = 7;  // original height 256 -> 263 > padded
  EXPECT_THROW(read_container(b), FormatError);
  for (std::size_t cut = 0; cut < good.size(); cut += 7) {
    EXPECT_THROW(read_container(std::span(good).first(cut)), FormatError) << cut;
  }
}

TEST(Container, WriteRejectsInconsistentMetadata) {
  Container c = image_container();
  c.header.padded = {252, 256};
  EXPECT_THROW(write_container(c), ShapeError);
  c = image_container();
  c.header.sigma[3] = 0.0f;
  EXPECT_THROW(write_container(c), ParameterError);
  c = image_container();
  c.latent = Tensor<std::int8_t>({12, 16, 32});
  EXPECT_THROW(write_container(c), ShapeError);
}

TEST(Container, GoldenFileDecodesExactly) {
  const Bytes golden = read_file(std::string(WLC_TEST_DATA_DIR) + "/golden.wllc");
  const Bytes expect = read_file(std::string(WLC_TEST_DATA_DIR) + "/golden_latent.i8");
  const Container c = read_container(golden);
  EXPECT_EQ(c.header.kind, Kind::k2D);
  EXPECT_EQ(c.header.levels, 3);
  EXPECT_EQ(c.header.original, (Shape{30, 27}));
  EXPECT_EQ(c.header.padded, (Shape{32, 32}));
  ASSERT_EQ(c.latent.shape(), (Shape{12, 4, 4}));
  ASSERT_EQ(expect.size(), c.latent.size());
  EXPECT_EQ(std::memcmp(expect.data(), c.latent.data(), expect.size()), 0);
  EXPECT_EQ(write_container(c), golden);
}

}  // namespace
}  // namespace wlc
