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
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "wlc/keyvalue.hpp"
#include "wlc/tensor.hpp"

namespace wlc {

// ---- PSNR ------------------------------------------------------------------

inline constexpr double kPeakUnit = 2.0;  // signals in [-1, 1]
inline constexpr double kPeak8Bit = 255.0;

template <class T>
double mse(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "mse");
  if (a.empty()) throw ShapeError("mse: empty signals");
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
    s += d * d;
  }
  return static_cast<double>(s / static_cast<long double>(a.size()));
}

inline double psnr_from_mse(double m, double peak) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

// +inf when the signals are identical.
template <class T>
double psnr(const Tensor<T>& reference, const Tensor<T>& test, double peak = kPeakUnit) {
  if (!(peak > 0.0)) throw ParameterError("psnr: peak must be positive");
  return psnr_from_mse(mse(reference, test), peak);
}

// One value per leading-axis channel.
template <class T>
std::vector<double> psnr_per_channel(const Tensor<T>& reference, const Tensor<T>& test,
                                     double peak = kPeakUnit) {
  require_same_shape(reference.shape(), test.shape(), "psnr_per_channel");
  const std::size_t c = reference.extent(0), n = reference.size() / c;
  std::vector<double> out;
  for (std::size_t k = 0; k < c; ++k) {
    long double s = 0;
    for (std::size_t i = k * n; i < (k + 1) * n; ++i) {
      const long double d = static_cast<long double>(reference[i]) - static_cast<long double>(test[i]);
      s += d * d;
    }
    out.push_back(psnr_from_mse(static_cast<double>(s / static_cast<long double>(n)), peak));
  }
  return out;
}

// ---- SSIM / MS-SSIM ---------------------------------------------------------
//
// Signals in [-1, 1] are mapped to [0, 255]. 11x11 Gaussian window with
// sigma 1.5, K1 = 0.01, K2 = 0.03, statistics over the valid region only.
// MS-SSIM uses five scales with weights (Wang, Simoncelli & Bovik, 2003)
// and 2x2 average pooling between scales.

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
inline constexpr std::size_t kMsSsimMinExtent = 176;

namespace detail {

struct Plane {
  std::size_t h = 0, w = 0;
  std::vector<double> v;
};

inline const std::array<double, kSsimWindow>& ssim_window() {
  static const std::array<double, kSsimWindow> g = [] {
    std::array<double, kSsimWindow> k{};
    double s = 0.0;
    for (std::size_t i = 0; i < kSsimWindow; ++i) {
      const double x = static_cast<double>(i) - 5.0;
      k[i] = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
      s += k[i];
    }
    for (auto& v : k) v /= s;
    return k;
  }();
  return g;
}

// Valid-region separable Gaussian filter.
inline Plane gauss_valid(const Plane& p) {
  const auto& g = ssim_window();
  const std::size_t oh = p.h - kSsimWindow + 1, ow = p.w - kSsimWindow + 1;
  std::vector<double> rows(p.h * ow, 0.0);
  for (std::size_t y = 0; y < p.h; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) s += g[k] * p.v[y * p.w + x + k];
      rows[y * ow + x] = s;
    }
  Plane out{oh, ow, std::vector<double>(oh * ow, 0.0)};
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t k = 0; k < kSsimWindow; ++k) {
      const double gk = g[k];
      const double* r = rows.data() + (y + k) * ow;
      double* o = out.v.data() + y * ow;
      for (std::size_t x = 0; x < ow; ++x) o[x] += gk * r[x];
    }
  return out;
}

struct SsimTerms {
  double ssim = 0.0;
  double cs = 0.0;
};

inline SsimTerms ssim_plane(const Plane& a, const Plane& b) {
  constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  Plane aa = a, bb = b, ab = a;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    aa.v[i] = a.v[i] * a.v[i];
    bb.v[i] = b.v[i] * b.v[i];
    ab.v[i] = a.v[i] * b.v[i];
  }
  const Plane ma = gauss_valid(a), mb = gauss_valid(b);
  const Plane saa = gauss_valid(aa), sbb = gauss_valid(bb), sab = gauss_valid(ab);
  double ssim = 0.0, cs = 0.0;
  const std::size_t n = ma.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mu_a = ma.v[i], mu_b = mb.v[i];
    const double va = saa.v[i] - mu_a * mu_a, vb = sbb.v[i] - mu_b * mu_b, cov = sab.v[i] - mu_a * mu_b;
    const double c = (2.0 * cov + c2) / (va + vb + c2);
    cs += c;
    ssim += c * (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
  }
  return {ssim / static_cast<double>(n), cs / static_cast<double>(n)};
}

inline Plane halve(const Plane& p) {
  Plane out{p.h / 2, p.w / 2, {}};
  out.v.resize(out.h * out.w);
  for (std::size_t y = 0; y < out.h; ++y)
    for (std::size_t x = 0; x < out.w; ++x) {
      const std::size_t i = 2 * y * p.w + 2 * x;
      out.v[y * out.w + x] = 0.25 * (p.v[i] + p.v[i + 1] + p.v[i + p.w] + p.v[i + p.w + 1]);
    }
  return out;
}

template <class T>
std::vector<Plane> planes_255(const Tensor<T>& s) {
  if (s.rank() != 3) throw ShapeError("ssim: expected [C, H, W], got " + shape_string(s.shape()));
  const std::size_t h = s.extent(1), w = s.extent(2);
  std::vector<Plane> out;
  for (std::size_t c = 0; c < s.extent(0); ++c) {
    Plane p{h, w, std::vector<double>(h * w)};
    for (std::size_t i = 0; i < h * w; ++i) p.v[i] = (static_cast<double>(s[c * h * w + i]) + 1.0) * 127.5;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

// Single-scale SSIM averaged over channels.
template <class T>
double ssim(const Tensor<T>& reference, const Tensor<T>& test) {
  require_same_shape(reference.shape(), test.shape(), "ssim");
  const auto a = detail::planes_255(reference), b = detail::planes_255(test);
  if (a[0].h < kSsimWindow || a[0].w < kSsimWindow) throw ShapeError("ssim: extents must be >= 11");
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += detail::ssim_plane(a[c], b[c]).ssim;
  return s / static_cast<double>(a.size());
}

struct MsSsimResult {
  double value = 0.0;
  bool fallback = false;  // input too small for five scales; value is SSIM
};

template <class T>
MsSsimResult ms_ssim(const Tensor<T>& reference, const Tensor<T>& test) {
  require_same_shape(reference.shape(), test.shape(), "ms_ssim");
  auto a = detail::planes_255(reference), b = detail::planes_255(test);
  if (std::min(a[0].h, a[0].w) < kMsSsimMinExtent) return {ssim(reference, test), true};
  double total = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    double v = 1.0;
    detail::Plane pa = a[c], pb = b[c];
    for (std::size_t s = 0; s < kMsSsimWeights.size(); ++s) {
      const auto t = detail::ssim_plane(pa, pb);
      const bool last = s + 1 == kMsSsimWeights.size();
      v *= std::pow(std::max(last ? t.ssim : t.cs, 0.0), kMsSsimWeights[s]);
      if (!last) {
        pa = detail::halve(pa);
        pb = detail::halve(pb);
      }
    }
    total += v;
  }
  return {total / static_cast<double>(a.size()), false};
}

struct QualityReport {
  double psnr = 0.0;
  std::vector<double> channel_psnr;
  bool spatial = false;  // ssim fields are set for [C, H, W] inputs only
  double ssim = 0.0;
  double ms_ssim = 0.0;  // equals ssim when ms_ssim_fallback
  bool ms_ssim_fallback = false;
};

template <class T>
QualityReport quality(const Tensor<T>& reference, const Tensor<T>& test, double peak = kPeakUnit) {
  QualityReport q;
  q.psnr = psnr(reference, test, peak);
  q.channel_psnr = psnr_per_channel(reference, test, peak);
  if (reference.rank() == 3) {
    q.spatial = true;
    q.ssim = ssim(reference, test);
    const auto m = ms_ssim(reference, test);
    q.ms_ssim = m.value;
    q.ms_ssim_fallback = m.fallback;
  }
  return q;
}

inline Record to_record(const QualityReport& q) {
  Record r;
  r.add("psnr", q.psnr, 4);
  for (std::size_t c = 0; c < q.channel_psnr.size(); ++c) r.add("psnr_c" + std::to_string(c), q.channel_psnr[c], 4);
  if (q.spatial) {
    r.add("ssim", q.ssim, 6).add("ms_ssim", q.ms_ssim, 6).add("ms_ssim_fallback", q.ms_ssim_fallback ? "1" : "0");
  }
  return r;
}

// ---- rate --------------------------------------------------------------------

// Bytes the uncompressed signal occupies: 8-bit samples for images, 16-bit
// for audio.
inline std::size_t original_bytes(const Shape& signal_shape) {
  return shape_size(signal_shape) * (signal_shape.size() == 3 ? 1 : 2);
}

inline double compression_ratio(const Shape& signal_shape, std::size_t container_bytes) {
  return static_cast<double>(original_bytes(signal_shape)) / static_cast<double>(container_bytes);
}

// ---- throughput ---------------------------------------------------------------

inline constexpr std::size_t kMinBenchReps = 5;
inline constexpr double kMinBenchSeconds = 1e-9;

struct ThroughputReport {
  std::size_t reps = 0;
  double samples = 0.0;  // pixels or audio samples per call
  double median_s = 0.0, p10_s = 0.0, p90_s = 0.0;
  double mega_per_s() const { return samples / std::max(median_s, kMinBenchSeconds) / 1e6; }
};

// Runs `fn` once untimed, then `reps` timed calls.
inline ThroughputReport bench(const std::function<void()>& fn, double samples_per_call, std::size_t reps) {
  if (reps < kMinBenchReps) throw ParameterError("bench: need at least 5 repetitions");
  fn();
  std::vector<double> t(reps);
  for (auto& s : t) {
    const auto a = std::chrono::steady_clock::now();
    fn();
    s = std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
  }
  std::sort(t.begin(), t.end());
  auto pick = [&](double q) {
    const double pos = q * static_cast<double>(reps - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, reps - 1);
    return std::max(t[lo] + (pos - static_cast<double>(lo)) * (t[hi] - t[lo]), kMinBenchSeconds);
  };
  return {reps, samples_per_call, pick(0.5), pick(0.1), pick(0.9)};
}

inline Record to_record(const ThroughputReport& r, const std::string& prefix) {
  Record out;
  out.add(prefix + "_mps", r.mega_per_s(), 4)
      .add(prefix + "_median_ms", r.median_s * 1e3, 4)
      .add(prefix + "_p10_ms", r.p10_s * 1e3, 4)
      .add(prefix + "_p90_ms", r.p90_s * 1e3, 4);
  return out;
}

}  // namespace wlc
