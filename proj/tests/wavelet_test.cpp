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

#include "wlc/wavelet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"

namespace wlc {
namespace {

double energy(const Tensor<double>& t) {
  double e = 0.0;
  for (double v : t) e += v * v;
  return e;
}

TEST(FilterBank, TapCountsAndGains) {
  const FilterBank fb = make_cdf97_filterbank();
  EXPECT_EQ(fb.lo_analysis.size(), 9u);
  EXPECT_EQ(fb.hi_analysis.size(), 7u);
  EXPECT_EQ(fb.lo_synthesis.size(), 7u);
  EXPECT_EQ(fb.hi_synthesis.size(), 9u);
  const double la = std::accumulate(fb.lo_analysis.begin(), fb.lo_analysis.end(), 0.0);
  const double ha = std::accumulate(fb.hi_analysis.begin(), fb.hi_analysis.end(), 0.0);
  const double ls = std::accumulate(fb.lo_synthesis.begin(), fb.lo_synthesis.end(), 0.0);
  EXPECT_NEAR(la, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ls, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ha, 0.0, 1e-12);
  // JPEG 2000 centre taps, rescaled from unit DC gain by sqrt(2).
  EXPECT_NEAR(fb.lo_analysis[4], 0.602949018236 * std::sqrt(2.0), 1e-11);
  EXPECT_NEAR(fb.hi_analysis[3], 1.115087052457 / std::sqrt(2.0), 1e-11);
}

TEST(FilterBank, OneLevelReconstructsLength64) {
  auto x = oracle::random_tensor<double>({1, 64}, 7);
  auto y = wpt_forward(x, 1);
  EXPECT_LT(max_abs_diff(wpt_inverse(y), x), 1e-10);
}

TEST(Wpt, ConstantSignalConcentratesInChannelZero) {
  const double c = 0.37;
  Tensor<double> x({1, 64}, c);
  auto y = wpt_forward(x, 2);
  ASSERT_EQ(y.coeffs.shape(), (Shape{4, 16}));
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(y.coeffs[i], 2.0 * c, 1e-6);
  for (std::size_t i = 16; i < 64; ++i) EXPECT_NEAR(y.coeffs[i], 0.0, 1e-6);
}

TEST(Wpt, RgbImageGeometry) {
  Tensor<float> x({3, 64, 64}, 0.0f);
  auto y = wpt_forward(x, 3);
  EXPECT_EQ(y.coeffs.shape(), (Shape{192, 8, 8}));
  EXPECT_EQ(y.coeffs.size(), x.size());
}

TEST(Wpt, MatchesExplicitMatrixOracle) {
  const FilterBank fb = make_cdf97_filterbank();
  for (int n : {4, 8, 12, 16, 24, 32}) {
    for (int levels : {1, 2}) {
      if (n % (1 << levels)) continue;
      auto x = oracle::random_tensor<double>({1, static_cast<std::size_t>(n)},
                                             static_cast<std::uint64_t>(n * 10 + levels));
      Eigen::VectorXd xv(n);
      for (int i = 0; i < n; ++i) xv(i) = x[static_cast<std::size_t>(i)];
      const Eigen::VectorXd expected = oracle::packet_matrix(fb, n, levels) * xv;
      auto y = wpt_forward(x, levels);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(y.coeffs[static_cast<std::size_t>(i)], expected(i), 1e-10)
            << "n=" << n << " J=" << levels << " i=" << i;
      }
    }
  }
}

TEST(Wpt, SeparableImageMatchesKroneckerOracle) {
  // A 2D level is the row transform applied after the column transform;
  // for [1, H, W] with one level the four children are blocks of
  // A_H * X * A_W^T.
  const FilterBank fb = make_cdf97_filterbank();
  const int h = 8, w = 12;
  auto x = oracle::random_tensor<double>({1, 8, 12}, 99);
  Eigen::MatrixXd xm(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) xm(r, c) = x[static_cast<std::size_t>(r * w + c)];
  const Eigen::MatrixXd z =
      oracle::analysis_matrix(fb, h) * xm * oracle::analysis_matrix(fb, w).transpose();
  auto y = wpt_forward(x, 1);
  ASSERT_EQ(y.coeffs.shape(), (Shape{4, 4, 6}));
  for (int v = 0; v < 2; ++v)
    for (int hb = 0; hb < 2; ++hb)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 6; ++c) {
          const double got = y.coeffs[static_cast<std::size_t>(((2 * v + hb) * 4 + r) * 6 + c)];
          EXPECT_NEAR(got, z(v * 4 + r, hb * 6 + c), 1e-10);
        }
}

TEST(Wpt, RoundTripDoubleAndSingle) {
  auto xd = oracle::random_tensor<double>({3, 64, 48}, 3);
  EXPECT_LT(max_abs_diff(wpt_inverse(wpt_forward(xd, 3)), xd), 1e-10);
  auto xf = oracle::random_tensor<float>({3, 128, 128}, 4);
  EXPECT_LT(max_abs_diff(wpt_inverse(wpt_forward(xf, 3)), xf), 1e-5f);
  auto a = oracle::random_tensor<double>({2, 256}, 5);
  EXPECT_LT(max_abs_diff(wpt_inverse(wpt_forward(a, 8)), a), 1e-10);
}

TEST(Wpt, Linearity) {
  auto x = oracle::random_tensor<double>({2, 32, 32}, 11);
  auto y = oracle::random_tensor<double>({2, 32, 32}, 12);
  const double a = 0.7, b = -1.3;
  Tensor<double> mix(x.shape());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * y[i];
  auto tx = wpt_forward(x, 2).coeffs, ty = wpt_forward(y, 2).coeffs;
  auto tm = wpt_forward(mix, 2).coeffs;
  for (std::size_t i = 0; i < tm.size(); ++i) EXPECT_NEAR(tm[i], a * tx[i] + b * ty[i], 1e-10);
}

TEST(Wpt, EnergyNearlyPreserved) {
  // Smooth content: most energy passes the lowpass path where the gain is
  // exact. A single level on white noise is within about 1.2%.
  Tensor<double> smooth({3, 128, 128});
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < 128; ++r)
      for (std::size_t k = 0; k < 128; ++k)
        smooth[(c * 128 + r) * 128 + k] = std::sin(0.05 * static_cast<double>(r) + 0.3 * static_cast<double>(c)) *
                                          std::cos(0.03 * static_cast<double>(k)) + 0.2;
  const double e0 = energy(smooth), e1 = energy(wpt_forward(smooth, 3).coeffs);
  EXPECT_NEAR(e1 / e0, 1.0, 0.02);

  auto noise = oracle::random_tensor<double>({4, 4096}, 21);
  EXPECT_NEAR(energy(wpt_forward(noise, 1).coeffs) / energy(noise), 1.0, 0.02);
}

TEST(Wpt, ZeroLevelsIsIdentity) {
  auto x = oracle::random_tensor<double>({2, 10}, 1);
  auto y = wpt_forward(x, 0);
  EXPECT_EQ(y.coeffs, x);
  EXPECT_EQ(wpt_inverse(y), x);
}

TEST(Wpt, RejectsNonDivisibleExtent) {
  Tensor<double> x({1, 30, 32});
  EXPECT_THROW(wpt_forward(x, 2), ShapeError);
  Tensor<double> y({1, 20});
  EXPECT_THROW(wpt_forward(y, 3), ShapeError);
}

TEST(Wpt, InverseRejectsInconsistentChannels) {
  SubbandTensor<double> s{Tensor<double>({5, 4, 4}), 1, Kind::k2D};
  EXPECT_THROW(wpt_inverse(s), ShapeError);
}

TEST(Wpt, InverseOfZeroIsZero) {
  SubbandTensor<double> s{Tensor<double>({48, 4, 4}), 2, Kind::k2D};
  auto x = wpt_inverse(s);
  EXPECT_EQ(x.shape(), (Shape{3, 16, 16}));
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(Wpt, LowpassImpulseSynthesisesUpsampledFilter) {
  const FilterBank fb = make_cdf97_filterbank();
  const std::size_t half = 16, k = 7;
  SubbandTensor<double> s{Tensor<double>({2, half}), 1, Kind::k1D};
  s.coeffs[k] = 1.0;
  auto x = wpt_inverse(s);
  // Direct upsample-then-convolve: the impulse sits at 2k and is spread
  // by the 7-tap lowpass synthesis filter.
  std::vector<double> up(2 * half, 0.0);
  up[2 * k] = 1.0;
  for (std::size_t n = 0; n < 2 * half; ++n) {
    double expected = 0.0;
    for (std::size_t m = 0; m < 2 * half; ++m) {
      const long d = static_cast<long>(n) - static_cast<long>(m);
      if (d >= -3 && d <= 3) expected += up[m] * fb.lo_synthesis[static_cast<std::size_t>(d + 3)];
    }
    EXPECT_NEAR(x[n], expected, 1e-14) << n;
  }
}

TEST(Wpt, AdjointsSatisfyInnerProductIdentity) {
  // <A x, y> == <x, A^T y> for both analysis and synthesis, 1D and 2D.
  for (Kind kind : {Kind::k1D, Kind::k2D}) {
    const Shape fine = kind == Kind::k1D ? Shape{2, 32} : Shape{2, 16, 8};
    auto x = oracle::random_tensor<double>(fine, 31);
    auto bands = wpt_analyze_planes(x, kind, 2);
    auto y = oracle::random_tensor<double>(bands.shape(), 32);
    auto aty = wpt_analyze_adjoint_planes(y, kind, 2);
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) lhs += bands[i] * y[i];
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * aty[i];
    EXPECT_NEAR(lhs, rhs, 1e-10);

    auto sx = wpt_synthesize_planes(y, kind, 2);
    auto sty = wpt_synthesize_adjoint_planes(x, kind, 2);
    lhs = rhs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) lhs += sx[i] * x[i];
    for (std::size_t i = 0; i < y.size(); ++i) rhs += y[i] * sty[i];
    EXPECT_NEAR(lhs, rhs, 1e-10);
  }
}

}  // namespace
}  // namespace wlc
