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

#include "wlc/learning.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"

namespace wlc {
namespace {

TaskSpec small_spec(std::uint64_t seed) {
  TaskSpec s;
  s.seed = seed;
  s.count = 400;
  return s;
}

CodecModel<float> codec16x() {
  CodecConfig c;
  c.channels = 3;
  c.levels = 3;
  c.latent_channels = 12;
  c.hidden = 4;
  c.depth = 1;
  CodecModel<float> m(c);
  m.init(3);
  return m;
}

TEST(Fft2, MatchesDirectDft) {
  const std::size_t h = 4, w = 6;
  Rng rng(1);
  std::vector<std::complex<double>> g(h * w);
  for (auto& v : g) v = {rng.normal(), rng.normal()};
  auto f = g;
  detail::fft2(f, h, w, false);
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v) {
      std::complex<double> acc = 0.0;
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
          const double a = -2.0 * std::numbers::pi *
                           (static_cast<double>(u * r) / h + static_cast<double>(v * c) / w);
          acc += g[r * w + c] * std::polar(1.0, a);
        }
      EXPECT_NEAR(std::abs(f[u * w + v] - acc), 0.0, 1e-10);
    }
  detail::fft2(f, h, w, true);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(f[i] - g[i]), 0.0, 1e-12);
}

TEST(TextureTask, DeterministicAndBalanced) {
  const TextureTask a = gen_texture_task(small_spec(5));
  const TextureTask b = gen_texture_task(small_spec(5));
  EXPECT_EQ(a.labels, b.labels);
  ASSERT_EQ(a.images.size(), 400u);
  for (std::size_t i = 0; i < a.images.size(); ++i) ASSERT_EQ(a.images[i], b.images[i]);
  EXPECT_EQ(std::accumulate(a.labels.begin(), a.labels.end(), 0), 200);
  EXPECT_EQ(a.images.front().shape(), (Shape{3, 64, 64}));
  EXPECT_NE(gen_texture_task(small_spec(6)).images.front(), a.images.front());
}

TEST(TextureTask, CalibrationHolds) {
  const TextureTask t = gen_texture_task(small_spec(7));
  EXPECT_GE(t.full_accuracy, 0.9);
  EXPECT_LE(t.reduced_accuracy, 0.6);
}

TEST(TextureTask, ClassPowerLiesInTheBand) {
  // Both textures are band-limited, so an 8x bicubic round trip keeps
  // almost none of the energy around each channel's offset.
  TaskSpec s = small_spec(8);
  s.background_amplitude = 0.0;
  s.noise_rms = 0.0;
  Rng rng(9);
  const std::size_t plane = s.extent * s.extent;
  for (int label : {0, 1}) {
    const Tensor<float> img = detail::texture_image(s, label, rng);
    const Tensor<float> low = bicubic_round_trip(img, 8, false);
    double e = 0.0, el = 0.0;
    for (std::size_t ch = 0; ch < s.channels; ++ch) {
      double mean = 0.0;
      for (std::size_t i = 0; i < plane; ++i) mean += img[ch * plane + i];
      mean /= static_cast<double>(plane);
      for (std::size_t i = ch * plane; i < (ch + 1) * plane; ++i) {
        e += (img[i] - mean) * (img[i] - mean);
        el += (low[i] - mean) * (low[i] - mean);
      }
    }
    EXPECT_LT(el, 0.05 * e) << "label " << label;
  }
}

TEST(TextureTask, LowBandFailsCalibration) {
  TaskSpec s = small_spec(10);
  s.band_low = 0.01;
  s.band_high = 0.04;
  EXPECT_THROW(gen_texture_task(s), CalibrationError);
}

TEST(TextureTask, RejectsBadSpecs) {
  TaskSpec s = small_spec(11);
  s.count = 401;
  EXPECT_THROW(gen_texture_task(s), ParameterError);
  s = small_spec(11);
  s.extent = 60;
  EXPECT_THROW(gen_texture_task(s), ParameterError);
  s = small_spec(11);
  s.band_high = 0.49;
  EXPECT_THROW(gen_texture_task(s), ParameterError);
}

TEST(ReferenceClassifier, SeparableFeaturesScorePerfectly) {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd v(3);
    const int label = i % 2;
    v << rng.normal() + 6.0 * label, rng.normal(), rng.normal();
    x.push_back(v);
    y.push_back(label);
  }
  EXPECT_EQ(detail::logistic_accuracy(x, y, 100), 1.0);
}

TEST(Featurize, DimensionsMatchAcrossModes) {
  const CodecModel<float> m = codec16x();
  std::vector<Tensor<float>> imgs{oracle::random_tensor<float>({3, 64, 64}, 13)};
  const auto lat = featurize(imgs, FeatureMode::latent(m));
  const auto down = featurize(imgs, FeatureMode::downsample(4));
  const auto id = featurize(imgs, FeatureMode::identity());
  EXPECT_EQ(lat.front().shape(), (Shape{12, 8, 8}));
  EXPECT_EQ(down.front().shape(), (Shape{3, 16, 16}));
  EXPECT_EQ(feature_dimension(lat), 768u);
  EXPECT_EQ(feature_dimension(down), 768u);
  EXPECT_EQ(feature_dimension(id), 12288u);
  EXPECT_NO_THROW(check_dimensions_match(768, 768));
  EXPECT_NO_THROW(check_dimensions_match(768, 775));
  EXPECT_THROW(check_dimensions_match(768, 3072), ShapeError);
  EXPECT_EQ(featurize(imgs, FeatureMode::latent(m)).front(), lat.front());
  EXPECT_THROW(featurize(imgs, FeatureMode::downsample(5)), ParameterError);
}

TEST(Featurize, LatentModeSkipsQuantisation) {
  const CodecModel<float> m = codec16x();
  std::vector<Tensor<float>> imgs{oracle::random_tensor<float>({3, 64, 64}, 14)};
  const auto lat = featurize(imgs, FeatureMode::latent(m)).front();
  bool fractional = false;
  for (float v : lat) fractional |= v != std::round(v);
  EXPECT_TRUE(fractional);
}

TEST(Comparison, ReproducibleUnderFixedSeed) {
  const TextureTask t = gen_texture_task(small_spec(15));
  const CodecModel<float> m = codec16x();
  ClassifierConfig cc;
  cc.steps = 20;
  cc.min_accuracy = 0.0;
  const auto [a1, b1] = run_comparison(t, m, cc, 3);
  const auto [a2, b2] = run_comparison(t, m, cc, 3);
  EXPECT_EQ(a1.accuracy, a2.accuracy);
  EXPECT_EQ(b1.accuracy, b2.accuracy);
  EXPECT_EQ(a1.input_dimension, 768u);
  EXPECT_EQ(b1.input_dimension, 768u);
  EXPECT_EQ(b1.representation, "downsample4x");
  EXPECT_NE(to_record(a1).str().find("representation=latent dim=768"), std::string::npos);
}

TEST(Comparison, NoConvergenceIsInconclusive) {
  const TextureTask t = gen_texture_task(small_spec(16));
  ClassifierConfig cc;
  cc.steps = 1;
  cc.min_accuracy = 1.01;
  EXPECT_THROW(run_comparison(t, codec16x(), cc, 0), InconclusiveError);
}

TEST(Comparison, RejectsIncompatibleModel) {
  const TextureTask t = gen_texture_task(small_spec(17));
  CodecConfig c;
  c.kind = Kind::k1D;
  c.channels = 3;
  c.levels = 2;
  c.latent_channels = 3;
  c.hidden = 4;
  c.depth = 1;
  EXPECT_THROW(run_comparison(t, CodecModel<float>(c), ClassifierConfig{}, 0), ShapeError);
}

TEST(ClassifierConfig, ParsesAndValidates) {
  auto kv = KeyValues::parse("width = 8\nsteps = 50\n");
  const ClassifierConfig c = classifier_config_from(kv);
  EXPECT_EQ(c.width, 8u);
  EXPECT_EQ(c.steps, 50u);
  EXPECT_THROW(classifier_config_from(KeyValues::parse("batch = 0\n")), ParameterError);
}

}  // namespace
}  // namespace wlc
