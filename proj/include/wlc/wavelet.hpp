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

// Wavelet packet transform built on the CDF 9/7 biorthogonal filterbank.
//
// One analysis level filters every channel with the lowpass and highpass
// analysis filters along each spatial axis and keeps every second sample,
// so a [C, N] signal becomes [2C, N/2] and a [C, H, W] image becomes
// [4C, H/2, W/2]. Channels are split in place, children adjacent to their
// parent (recursive order): child 2c / 2c+1 for low / high in 1D, and
// child 4c + 2v + h in 2D where v and h are the vertical and horizontal
// band. Boundaries use whole-sample symmetric extension, which keeps the
// transform perfectly reconstructing for every even extent.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wlc/tensor.hpp"

namespace wlc {

enum class Kind : std::uint8_t { k1D = 1, k2D = 2 };

inline int spatial_dims(Kind kind) { return kind == Kind::k1D ? 1 : 2; }

inline Kind kind_from_rank(std::size_t rank) {
  if (rank == 2) return Kind::k1D;
  if (rank == 3) return Kind::k2D;
  throw ShapeError("signal must be [C, N] or [C, H, W], got rank " +
                   std::to_string(rank));
}

// Taps are stored centred: lo_analysis[4] and hi_synthesis[4] are the
// centre of the 9-tap filters, lo_synthesis[3] and hi_analysis[3] the
// centre of the 7-tap filters.
struct FilterBank {
  std::array<double, 9> lo_analysis;
  std::array<double, 7> hi_analysis;
  std::array<double, 7> lo_synthesis;
  std::array<double, 9> hi_synthesis;
};

// CDF 9/7 as used by JPEG 2000 (irreversible path), scaled so that both
// lowpass filters have DC gain sqrt(2). Highpass filters are the
// alternating-sign modulation of the opposite lowpass filter.
inline FilterBank make_cdf97_filterbank() {
  constexpr std::array<double, 5> la_half = {
      0.8526986790094034193, 0.3774028556126537641, -0.1106244044184234088,
      -0.02384946501938000191, 0.03782845550699546139};
  constexpr std::array<double, 4> ls_half = {
      0.7884856164056643978, 0.4180922732222122008, -0.04068941760955843672,
      -0.06453888262893843864};
  FilterBank fb{};
  for (int i = -4; i <= 4; ++i) {
    const double v = la_half[static_cast<std::size_t>(std::abs(i))];
    fb.lo_analysis[static_cast<std::size_t>(i + 4)] = v;
    fb.hi_synthesis[static_cast<std::size_t>(i + 4)] = (i % 2 == 0) ? v : -v;
  }
  for (int i = -3; i <= 3; ++i) {
    const double v = ls_half[static_cast<std::size_t>(std::abs(i))];
    fb.lo_synthesis[static_cast<std::size_t>(i + 3)] = v;
    fb.hi_analysis[static_cast<std::size_t>(i + 3)] = (i % 2 == 0) ? v : -v;
  }
  return fb;
}

inline const FilterBank& cdf97() {
  static const FilterBank fb = make_cdf97_filterbank();
  return fb;
}

template <class T>
struct SubbandTensor {
  Tensor<T> coeffs;  // [C * 2^(J*d), extent / 2^J ...]
  int levels = 0;
  Kind kind = Kind::k2D;

  std::size_t bands_per_channel() const {
    return std::size_t{1} << (levels * spatial_dims(kind));
  }
};

namespace detail {

// Whole-sample symmetric extension: ... x2 x1 | x0 x1 ... xn-1 | xn-2 ...
inline std::ptrdiff_t reflect(std::ptrdiff_t m, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  m %= period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

inline bool inside(std::ptrdiff_t m, std::ptrdiff_t n) { return m >= 0 && m < n; }

template <class T>
struct Taps {
  std::array<T, 9> la, hs;
  std::array<T, 7> ha, ls;

  explicit Taps(const FilterBank& fb) {
    for (std::size_t i = 0; i < 9; ++i) {
      la[i] = static_cast<T>(fb.lo_analysis[i]);
      hs[i] = static_cast<T>(fb.hi_synthesis[i]);
    }
    for (std::size_t i = 0; i < 7; ++i) {
      ha[i] = static_cast<T>(fb.hi_analysis[i]);
      ls[i] = static_cast<T>(fb.lo_synthesis[i]);
    }
  }

  // Synthesis weight applied to interleaved sample m at offset d = n - m.
  T synthesis(std::ptrdiff_t m, std::ptrdiff_t d) const {
    if (m % 2 == 0) {
      return (d >= -3 && d <= 3) ? ls[static_cast<std::size_t>(d + 3)] : T{0};
    }
    return hs[static_cast<std::size_t>(d + 4)];
  }
};

// d[j] = sum_i c[i] * a_i[j]. Separate restrict parameters let the
// compiler vectorise without runtime alias checks.
template <class T>
inline void fir9(const T* __restrict a0, const T* __restrict a1, const T* __restrict a2,
                 const T* __restrict a3, const T* __restrict a4, const T* __restrict a5,
                 const T* __restrict a6, const T* __restrict a7, const T* __restrict a8,
                 const T* c, T* __restrict d, std::size_t r) {
  const T c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3], c4 = c[4], c5 = c[5], c6 = c[6],
          c7 = c[7], c8 = c[8];
  for (std::size_t j = 0; j < r; ++j) {
    d[j] = c0 * a0[j] + c1 * a1[j] + c2 * a2[j] + c3 * a3[j] + c4 * a4[j] + c5 * a5[j] +
           c6 * a6[j] + c7 * a7[j] + c8 * a8[j];
  }
}

template <class T>
inline void fir7(const T* __restrict a0, const T* __restrict a1, const T* __restrict a2,
                 const T* __restrict a3, const T* __restrict a4, const T* __restrict a5,
                 const T* __restrict a6, const T* c, T* __restrict d, std::size_t r) {
  const T c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3], c4 = c[4], c5 = c[5], c6 = c[6];
  for (std::size_t j = 0; j < r; ++j) {
    d[j] = c0 * a0[j] + c1 * a1[j] + c2 * a2[j] + c3 * a3[j] + c4 * a4[j] + c5 * a5[j] +
           c6 * a6[j];
  }
}

template <class T>
inline void axpy(T a, const T* x, T* y, std::size_t r) {
  for (std::size_t j = 0; j < r; ++j) y[j] += a * x[j];
}

// Polyphase analysis of one contiguous line of even length n.
template <class T>
void analyze_line(const T* x, std::size_t n, T* lo, T* hi, const Taps<T>& t,
                  std::vector<T>& scratch) {
  const std::size_t half = n / 2;
  const std::size_t ext = half + 5;  // even[m] = x[2m - 4], odd[m] = x[2m - 3]
  scratch.resize(2 * ext);
  T* even = scratch.data();
  T* odd = even + ext;
  const auto sn = static_cast<std::ptrdiff_t>(n);
  auto edge = [&](std::size_t m) {
    const auto j = static_cast<std::ptrdiff_t>(2 * m) - 4;
    even[m] = x[reflect(j, sn)];
    odd[m] = x[reflect(j + 1, sn)];
  };
  const std::size_t interior_end = std::min(ext, half + 2);
  for (std::size_t m = 0; m < std::min<std::size_t>(2, ext); ++m) edge(m);
  for (std::size_t m = 2; m < interior_end; ++m) {
    even[m] = x[2 * m - 4];
    odd[m] = x[2 * m - 3];
  }
  for (std::size_t m = std::max<std::size_t>(2, interior_end); m < ext; ++m) edge(m);
  const T* e = even;
  const T* o = odd;
  for (std::size_t k = 0; k < half; ++k) {
    lo[k] = t.la[0] * e[k] + t.la[1] * o[k] + t.la[2] * e[k + 1] + t.la[3] * o[k + 1] +
            t.la[4] * e[k + 2] + t.la[5] * o[k + 2] + t.la[6] * e[k + 3] + t.la[7] * o[k + 3] +
            t.la[8] * e[k + 4];
    hi[k] = t.ha[0] * e[k + 1] + t.ha[1] * o[k + 1] + t.ha[2] * e[k + 2] + t.ha[3] * o[k + 2] +
            t.ha[4] * e[k + 3] + t.ha[5] * o[k + 3] + t.ha[6] * e[k + 4];
  }
}

// Polyphase synthesis of one line of even length n from its lo/hi halves.
// Symmetric extension of the interleaved sequence preserves parity, so the
// extended lowpass and highpass phases can be built separately.
template <class T>
void synthesize_line(const T* lo, const T* hi, std::size_t n, T* x, const Taps<T>& t,
                     std::vector<T>& scratch) {
  const std::size_t half = n / 2;
  const std::size_t ext = half + 4;  // phase index j in [-2, half + 1]
  scratch.resize(2 * ext);
  T* lo_e = scratch.data();
  T* hi_e = lo_e + ext;
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t m = 0; m < ext; ++m) {
    const auto j = static_cast<std::ptrdiff_t>(m) - 2;
    const std::ptrdiff_t e = inside(2 * j, sn) ? 2 * j : reflect(2 * j, sn);
    const std::ptrdiff_t o = inside(2 * j + 1, sn) ? 2 * j + 1 : reflect(2 * j + 1, sn);
    lo_e[m] = lo[e / 2];
    hi_e[m] = hi[o / 2];
  }
  const T* l = lo_e + 2;  // l[d] = lo[k + d] relative to k = 0
  const T* h = hi_e + 2;
  for (std::size_t k = 0; k < half; ++k) {
    x[2 * k] = t.ls[5] * l[k - 1] + t.ls[3] * l[k] + t.ls[1] * l[k + 1] +
               t.hs[7] * h[k - 2] + t.hs[5] * h[k - 1] + t.hs[3] * h[k] + t.hs[1] * h[k + 1];
    x[2 * k + 1] = t.ls[6] * l[k - 1] + t.ls[4] * l[k] + t.ls[2] * l[k + 1] + t.ls[0] * l[k + 2] +
                   t.hs[8] * h[k - 2] + t.hs[6] * h[k - 1] + t.hs[4] * h[k] + t.hs[2] * h[k + 1] +
                   t.hs[0] * h[k + 2];
  }
}

// The four primitives below act along the leading axis of an [n, r] block:
// row i of the block is the r contiguous values at offset i * r.

template <class T>
void axis_analyze(const T* x, std::size_t n, std::size_t r, T* lo, T* hi,
                  const Taps<T>& t, std::vector<T>& scratch) {
  if (r == 1) {
    analyze_line(x, n, lo, hi, t, scratch);
    return;
  }
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto sr = static_cast<std::ptrdiff_t>(r);
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const auto base = static_cast<std::ptrdiff_t>(2 * k);
    const T* row[9];  // rows 2k-4 .. 2k+4
    for (std::ptrdiff_t i = -4; i <= 4; ++i) row[i + 4] = x + reflect(base + i, sn) * sr;
    fir9(row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7], row[8], t.la.data(),
         lo + k * r, r);
    fir7(row[2], row[3], row[4], row[5], row[6], row[7], row[8], t.ha.data(), hi + k * r, r);
  }
}

template <class T>
void axis_synthesize(const T* lo, const T* hi, std::size_t n, std::size_t r,
                     T* x, const Taps<T>& t, std::vector<T>& scratch) {
  if (r == 1) {
    synthesize_line(lo, hi, n, x, t, scratch);
    return;
  }
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t out = 0; out < sn; ++out) {
    const T* row[9];
    T c[9];
    for (std::ptrdiff_t s = -4; s <= 4; ++s) {
      const std::ptrdiff_t m = out + s;
      const std::ptrdiff_t src = reflect(m, sn);
      c[s + 4] = t.synthesis(m, -s);
      row[s + 4] = (src % 2 == 0 ? lo : hi) + static_cast<std::size_t>(src / 2) * r;
    }
    fir9(row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7], row[8], c,
         x + static_cast<std::size_t>(out) * r, r);
  }
}

// Transpose of axis_analyze: scatters subband gradients back to samples.
template <class T>
void axis_analyze_adjoint(const T* glo, const T* ghi, std::size_t n,
                          std::size_t r, T* gx, const Taps<T>& t) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const std::size_t half = n / 2;
  std::fill(gx, gx + n * r, T{0});
  for (std::size_t k = 0; k < half; ++k) {
    const auto base = static_cast<std::ptrdiff_t>(2 * k);
    for (std::ptrdiff_t i = -4; i <= 4; ++i) {
      axpy(t.la[static_cast<std::size_t>(i + 4)], glo + k * r,
           gx + reflect(base + i, sn) * static_cast<std::ptrdiff_t>(r), r);
    }
    for (std::ptrdiff_t i = -3; i <= 3; ++i) {
      axpy(t.ha[static_cast<std::size_t>(i + 3)], ghi + k * r,
           gx + reflect(base + 1 + i, sn) * static_cast<std::ptrdiff_t>(r), r);
    }
  }
}

// Transpose of axis_synthesize.
template <class T>
void axis_synthesize_adjoint(const T* gx, std::size_t n, std::size_t r,
                             T* glo, T* ghi, const Taps<T>& t) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  std::fill(glo, glo + (n / 2) * r, T{0});
  std::fill(ghi, ghi + (n / 2) * r, T{0});
  for (std::ptrdiff_t out = 0; out < sn; ++out) {
    for (std::ptrdiff_t s = -4; s <= 4; ++s) {
      const std::ptrdiff_t m = out + s;
      const T c = t.synthesis(m, -s);
      if (c == T{0}) continue;
      const std::ptrdiff_t src = reflect(m, sn);
      T* row = (src % 2 == 0 ? glo : ghi) + static_cast<std::size_t>(src / 2) * r;
      axpy(c, gx + static_cast<std::size_t>(out) * r, row, r);
    }
  }
}

enum class LevelOp { kAnalyze, kSynthesize, kAnalyzeAdjoint, kSynthesizeAdjoint };

// One packet level over a tensor of planes [P, spatial...]. kAnalyze and
// kSynthesizeAdjoint map fine -> coarse; the other two map coarse -> fine.
template <class T>
Tensor<T> apply_level(const Tensor<T>& in, Kind kind, LevelOp op,
                      const Taps<T>& t) {
  const bool to_coarse =
      op == LevelOp::kAnalyze || op == LevelOp::kSynthesizeAdjoint;
  const Shape& s = in.shape();
  std::vector<T> scratch;
  if (kind == Kind::k1D) {
    const std::size_t planes = s[0];
    if (to_coarse) {
      const std::size_t n = s[1];
      Tensor<T> out({planes * 2, n / 2});
      for (std::size_t p = 0; p < planes; ++p) {
        const T* x = in.data() + p * n;
        T* lo = out.data() + (2 * p) * (n / 2);
        T* hi = lo + n / 2;
        if (op == LevelOp::kAnalyze) {
          axis_analyze(x, n, 1, lo, hi, t, scratch);
        } else {
          axis_synthesize_adjoint(x, n, 1, lo, hi, t);
        }
      }
      return out;
    }
    const std::size_t planes_out = s[0] / 2;
    const std::size_t half = s[1];
    const std::size_t n = half * 2;
    Tensor<T> out({planes_out, n});
    for (std::size_t p = 0; p < planes_out; ++p) {
      const T* lo = in.data() + (2 * p) * half;
      const T* hi = lo + half;
      T* x = out.data() + p * n;
      if (op == LevelOp::kSynthesize) {
        axis_synthesize(lo, hi, n, 1, x, t, scratch);
      } else {
        axis_analyze_adjoint(lo, hi, n, 1, x, t);
      }
    }
    return out;
  }

  if (to_coarse) {
    const std::size_t planes = s[0], h = s[1], w = s[2];
    const std::size_t h2 = h / 2, w2 = w / 2;
    Tensor<T> out({planes * 4, h2, w2});
    std::vector<T> vlo(h2 * w), vhi(h2 * w);
    for (std::size_t p = 0; p < planes; ++p) {
      const T* x = in.data() + p * h * w;
      T* child = out.data() + (4 * p) * h2 * w2;
      const std::size_t cs = h2 * w2;
      if (op == LevelOp::kAnalyze) {
        axis_analyze(x, h, w, vlo.data(), vhi.data(), t, scratch);
        for (std::size_t row = 0; row < h2; ++row) {
          axis_analyze(vlo.data() + row * w, w, 1, child + row * w2,
                       child + cs + row * w2, t, scratch);
          axis_analyze(vhi.data() + row * w, w, 1, child + 2 * cs + row * w2,
                       child + 3 * cs + row * w2, t, scratch);
        }
      } else {
        // Adjoint of (horizontal synthesis, then vertical synthesis).
        axis_synthesize_adjoint(x, h, w, vlo.data(), vhi.data(), t);
        for (std::size_t row = 0; row < h2; ++row) {
          axis_synthesize_adjoint(vlo.data() + row * w, w, 1, child + row * w2,
                                  child + cs + row * w2, t);
          axis_synthesize_adjoint(vhi.data() + row * w, w, 1,
                                  child + 2 * cs + row * w2,
                                  child + 3 * cs + row * w2, t);
        }
      }
    }
    return out;
  }

  const std::size_t planes_out = s[0] / 4, h2 = s[1], w2 = s[2];
  const std::size_t h = h2 * 2, w = w2 * 2;
  Tensor<T> out({planes_out, h, w});
  std::vector<T> vlo(h2 * w), vhi(h2 * w);
  for (std::size_t p = 0; p < planes_out; ++p) {
    const T* child = in.data() + (4 * p) * h2 * w2;
    const std::size_t cs = h2 * w2;
    T* x = out.data() + p * h * w;
    if (op == LevelOp::kSynthesize) {
      for (std::size_t row = 0; row < h2; ++row) {
        axis_synthesize(child + row * w2, child + cs + row * w2, w, 1,
                        vlo.data() + row * w, t, scratch);
        axis_synthesize(child + 2 * cs + row * w2, child + 3 * cs + row * w2, w,
                        1, vhi.data() + row * w, t, scratch);
      }
      axis_synthesize(vlo.data(), vhi.data(), h, w, x, t, scratch);
    } else {
      // Adjoint of (vertical analysis, then horizontal analysis).
      for (std::size_t row = 0; row < h2; ++row) {
        axis_analyze_adjoint(child + row * w2, child + cs + row * w2, w, 1,
                             vlo.data() + row * w, t);
        axis_analyze_adjoint(child + 2 * cs + row * w2,
                             child + 3 * cs + row * w2, w, 1,
                             vhi.data() + row * w, t);
      }
      axis_analyze_adjoint(vlo.data(), vhi.data(), h, w, x, t);
    }
  }
  return out;
}

inline void check_divisible(const Shape& s, int levels) {
  const std::size_t block = std::size_t{1} << levels;
  for (std::size_t axis = 1; axis < s.size(); ++axis) {
    if (s[axis] % block != 0 || s[axis] == 0) {
      throw ShapeError("extent " + std::to_string(s[axis]) + " on axis " +
                       std::to_string(axis) + " is not divisible by 2^" +
                       std::to_string(levels));
    }
  }
}

inline void check_levels(int levels) {
  if (levels < 0 || levels > 16) {
    throw ParameterError("wavelet level count out of range: " +
                         std::to_string(levels));
  }
}

inline void check_planes(const Shape& s, Kind kind) {
  if (s.size() != static_cast<std::size_t>(spatial_dims(kind)) + 1) {
    throw ShapeError("expected " + std::to_string(spatial_dims(kind) + 1) +
                     "-d plane tensor, got " + shape_string(s));
  }
}

}  // namespace detail

// Packet analysis over a stack of planes [P, spatial...]: returns
// [P * 2^(J*d), spatial / 2^J ...]. Leading axis may hold batch * channel.
template <class T>
Tensor<T> wpt_analyze_planes(const Tensor<T>& planes, Kind kind, int levels,
                             const FilterBank& fb = cdf97()) {
  detail::check_levels(levels);
  detail::check_planes(planes.shape(), kind);
  detail::check_divisible(planes.shape(), levels);
  const detail::Taps<T> taps(fb);
  Tensor<T> cur = planes;
  for (int j = 0; j < levels; ++j) {
    cur = detail::apply_level(cur, kind, detail::LevelOp::kAnalyze, taps);
  }
  return cur;
}

template <class T>
Tensor<T> wpt_synthesize_planes(const Tensor<T>& bands, Kind kind, int levels,
                                const FilterBank& fb = cdf97()) {
  detail::check_levels(levels);
  detail::check_planes(bands.shape(), kind);
  const std::size_t group = std::size_t{1} << (levels * spatial_dims(kind));
  if (bands.extent(0) % group != 0) {
    throw ShapeError("subband channel count " +
                     std::to_string(bands.extent(0)) +
                     " is not a multiple of 2^(J*d) = " + std::to_string(group));
  }
  const detail::Taps<T> taps(fb);
  Tensor<T> cur = bands;
  for (int j = 0; j < levels; ++j) {
    cur = detail::apply_level(cur, kind, detail::LevelOp::kSynthesize, taps);
  }
  return cur;
}

// Transpose of wpt_analyze_planes (not its inverse; the filterbank is only
// near-orthogonal).
template <class T>
Tensor<T> wpt_analyze_adjoint_planes(const Tensor<T>& grad_bands, Kind kind,
                                     int levels,
                                     const FilterBank& fb = cdf97()) {
  detail::check_levels(levels);
  detail::check_planes(grad_bands.shape(), kind);
  const detail::Taps<T> taps(fb);
  Tensor<T> cur = grad_bands;
  for (int j = 0; j < levels; ++j) {
    cur = detail::apply_level(cur, kind, detail::LevelOp::kAnalyzeAdjoint, taps);
  }
  return cur;
}

// Transpose of wpt_synthesize_planes.
template <class T>
Tensor<T> wpt_synthesize_adjoint_planes(const Tensor<T>& grad_signal, Kind kind,
                                        int levels,
                                        const FilterBank& fb = cdf97()) {
  detail::check_levels(levels);
  detail::check_planes(grad_signal.shape(), kind);
  detail::check_divisible(grad_signal.shape(), levels);
  const detail::Taps<T> taps(fb);
  Tensor<T> cur = grad_signal;
  for (int j = 0; j < levels; ++j) {
    cur = detail::apply_level(cur, kind, detail::LevelOp::kSynthesizeAdjoint,
                              taps);
  }
  return cur;
}

// Forward packet transform of a [C, N] or [C, H, W] signal.
template <class T>
SubbandTensor<T> wpt_forward(const Tensor<T>& signal, int levels,
                             const FilterBank& fb = cdf97()) {
  const Kind kind = kind_from_rank(signal.rank());
  return {wpt_analyze_planes(signal, kind, levels, fb), levels, kind};
}

template <class T>
Tensor<T> wpt_inverse(const SubbandTensor<T>& subbands,
                      const FilterBank& fb = cdf97()) {
  return wpt_synthesize_planes(subbands.coeffs, subbands.kind, subbands.levels,
                               fb);
}

}  // namespace wlc
