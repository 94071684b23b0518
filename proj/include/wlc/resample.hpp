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

// Separable bicubic resampling (Keys kernel, a = -0.5). When shrinking, the
// kernel is stretched by the scale factor so it also acts as the
// anti-aliasing prefilter. Taps falling outside the signal are dropped and
// the remainder renormalised.

#include <algorithm>
#include <cmath>
#include <vector>

#include "wlc/tensor.hpp"

namespace wlc {

inline double cubic_kernel(double x, double a = -0.5) {
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

namespace detail {

struct ResampleTaps {
  std::vector<std::size_t> first;
  std::vector<std::vector<double>> weights;
};

inline ResampleTaps resample_taps(std::size_t in, std::size_t out) {
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double fscale = std::max(scale, 1.0);
  const double support = 2.0 * fscale;
  ResampleTaps t;
  t.first.resize(out);
  t.weights.resize(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * scale;
    const auto lo = static_cast<std::ptrdiff_t>(std::max(0.0, std::floor(center - support + 0.5)));
    const auto hi = static_cast<std::ptrdiff_t>(
        std::min(static_cast<double>(in), std::floor(center + support + 0.5)));
    std::vector<double> w;
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j < hi; ++j) {
      const double v = cubic_kernel((static_cast<double>(j) - center + 0.5) / fscale);
      w.push_back(v);
      sum += v;
    }
    if (sum != 0.0)
      for (auto& v : w) v /= sum;
    t.first[i] = static_cast<std::size_t>(lo);
    t.weights[i] = std::move(w);
  }
  return t;
}

// Resamples axis `axis` of a contiguous tensor.
template <class T>
Tensor<T> resample_axis(const Tensor<T>& in, std::size_t axis, std::size_t out_extent) {
  const Shape& s = in.shape();
  const std::size_t n = s[axis];
  if (n == out_extent) return in;
  const std::size_t inner = inner_size(s, axis + 1);
  const std::size_t outer = in.size() / (n * inner);
  Shape os = s;
  os[axis] = out_extent;
  Tensor<T> out(os);
  const ResampleTaps taps = resample_taps(n, out_extent);
  for (std::size_t o = 0; o < outer; ++o) {
    const T* src = in.data() + o * n * inner;
    T* dst = out.data() + o * out_extent * inner;
    for (std::size_t i = 0; i < out_extent; ++i) {
      T* d = dst + i * inner;
      const auto& w = taps.weights[i];
      for (std::size_t k = 0; k < w.size(); ++k) {
        const T* sp = src + (taps.first[i] + k) * inner;
        const T wk = static_cast<T>(w[k]);
        for (std::size_t r = 0; r < inner; ++r) d[r] += wk * sp[r];
      }
    }
  }
  return out;
}

}  // namespace detail

// Resizes the spatial axes (all but axis 0) of [C, spatial...] to `extents`.
template <class T>
Tensor<T> resize_bicubic(const Tensor<T>& signal, const Shape& extents) {
  if (signal.rank() != extents.size() + 1) {
    throw ShapeError("resize_bicubic: need one target extent per spatial axis");
  }
  Tensor<T> cur = signal;
  for (std::size_t a = 0; a < extents.size(); ++a) {
    if (extents[a] == 0) throw ShapeError("resize_bicubic: zero target extent");
    cur = detail::resample_axis(cur, a + 1, extents[a]);
  }
  return cur;
}

// Stored-pixel baseline: shrink every spatial axis by `factor`, keep the
// small signal at 8 bits per sample, then enlarge back. `factor` must divide
// every spatial extent.
inline Tensor<float> bicubic_round_trip(const Tensor<float>& signal, std::size_t factor, bool quantize = true) {
  Shape small, full;
  for (std::size_t a = 1; a < signal.rank(); ++a) {
    if (factor == 0 || signal.extent(a) % factor != 0) {
      throw ShapeError("bicubic_round_trip: factor must divide " + shape_string(signal.shape()));
    }
    small.push_back(signal.extent(a) / factor);
    full.push_back(signal.extent(a));
  }
  Tensor<float> low = resize_bicubic(signal, small);
  for (auto& v : low) {
    v = std::clamp(v, -1.0f, 1.0f);
    if (quantize) v = static_cast<float>(std::lround((v + 1.0f) * 127.5f)) / 127.5f - 1.0f;
  }
  Tensor<float> up = resize_bicubic(low, full);
  for (auto& v : up) v = std::clamp(v, -1.0f, 1.0f);
  return up;
}

}  // namespace wlc
