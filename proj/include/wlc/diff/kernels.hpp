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

// Forward and backward arithmetic for the layers, independent of the tape.
// Activations are laid out [B, C, spatial...]; the channel axis is 1.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstring>

#include "wlc/tensor.hpp"

namespace wlc::kernels {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapR = Eigen::Map<RowMat<T>>;
template <class T>
using CMapR = Eigen::Map<const RowMat<T>>;

// Number of positions per sample: product of extents past the channel axis.
inline std::size_t positions(const Shape& s) { return inner_size(s, 2); }

inline void check_activation(const Shape& s, const char* what) {
  if (s.size() < 2) {
    throw ShapeError(std::string(what) + ": expected [B, C, ...], got " +
                     shape_string(s));
  }
}

// ---- dense (per-position affine map along channels) ------------------

template <class T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& weight,
                        const Tensor<T>& bias) {
  check_activation(x.shape(), "dense");
  if (weight.rank() != 2 || weight.extent(0) != x.extent(1) ||
      bias.size() != weight.extent(1)) {
    throw ShapeError("dense: input " + shape_string(x.shape()) + ", weight " +
                     shape_string(weight.shape()) + ", bias " +
                     shape_string(bias.shape()));
  }
  const std::size_t batch = x.extent(0), cin = weight.extent(0),
                    cout = weight.extent(1), pos = positions(x.shape());
  Shape out_shape = x.shape();
  out_shape[1] = cout;
  Tensor<T> y(out_shape);
  CMapR<T> w(weight.data(), static_cast<Eigen::Index>(cin), static_cast<Eigen::Index>(cout));
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias.data(), static_cast<Eigen::Index>(cout));
  for (std::size_t n = 0; n < batch; ++n) {
    CMapR<T> xb(x.data() + n * cin * pos, static_cast<Eigen::Index>(cin), static_cast<Eigen::Index>(pos));
    MapR<T> yb(y.data() + n * cout * pos, static_cast<Eigen::Index>(cout), static_cast<Eigen::Index>(pos));
    yb.noalias() = w.transpose() * xb;
    yb.colwise() += b;
  }
  return y;
}

// Accumulates into grad_x (if non-null), grad_w and grad_b.
template <class T>
void dense_backward(const Tensor<T>& x, const Tensor<T>& weight,
                    const Tensor<T>& grad_y, Tensor<T>* grad_x,
                    Tensor<T>* grad_w, Tensor<T>* grad_b) {
  const std::size_t batch = x.extent(0), cin = weight.extent(0),
                    cout = weight.extent(1), pos = positions(x.shape());
  CMapR<T> w(weight.data(), static_cast<Eigen::Index>(cin), static_cast<Eigen::Index>(cout));
  for (std::size_t n = 0; n < batch; ++n) {
    CMapR<T> xb(x.data() + n * cin * pos, static_cast<Eigen::Index>(cin), static_cast<Eigen::Index>(pos));
    CMapR<T> gy(grad_y.data() + n * cout * pos, static_cast<Eigen::Index>(cout), static_cast<Eigen::Index>(pos));
    if (grad_x) {
      MapR<T> gx(grad_x->data() + n * cin * pos, static_cast<Eigen::Index>(cin), static_cast<Eigen::Index>(pos));
      gx.noalias() += w * gy;
    }
    if (grad_w) {
      MapR<T> gw(grad_w->data(), static_cast<Eigen::Index>(cin), static_cast<Eigen::Index>(cout));
      gw.noalias() += xb * gy.transpose();
    }
    if (grad_b) {
      Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> gb(grad_b->data(), static_cast<Eigen::Index>(cout));
      gb += gy.rowwise().sum();
    }
  }
}

// ---- 3-tap / 3x3 same-padded convolution via im2col -----------------

struct ConvGeometry {
  std::size_t batch, cin, cout, height, width;  // 1D uses height == 1
  int dims;
  std::size_t taps() const { return dims == 1 ? 3 : 9; }
  std::size_t pos() const { return height * width; }
};

template <class T>
ConvGeometry conv_geometry(const Shape& x, const Shape& kernel,
                           std::size_t bias_size) {
  check_activation(x, "conv");
  const int dims = static_cast<int>(x.size()) - 2;
  if (dims != 1 && dims != 2) throw ShapeError("conv: only 1D and 2D inputs");
  const bool ok_kernel =
      kernel.size() == static_cast<std::size_t>(dims + 2) && kernel[1] == x[1] &&
      kernel[2] == 3 && (dims == 1 || kernel[3] == 3);
  if (!ok_kernel || bias_size != kernel[0]) {
    throw ShapeError("conv: input " + shape_string(x) + ", kernel " +
                     shape_string(kernel));
  }
  return {x[0], x[1], kernel[0], dims == 1 ? 1 : x[2], dims == 1 ? x[2] : x[3], dims};
}

// cols: [cin * taps, batch * pos], row (ci, kr, kc), column (b, r, c).
template <class T>
void im2col(const T* x, const ConvGeometry& g, T* cols) {
  const std::size_t pos = g.pos(), total = g.batch * pos;
  const int kh = g.dims == 1 ? 1 : 3;
  const auto h = static_cast<long>(g.height), w = static_cast<long>(g.width);
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    for (int kr = 0; kr < kh; ++kr) {
      for (int kc = 0; kc < 3; ++kc) {
        const int dr = g.dims == 1 ? 0 : kr - 1, dc = kc - 1;
        T* row = cols + ((ci * static_cast<std::size_t>(kh) + static_cast<std::size_t>(kr)) * 3 +
                         static_cast<std::size_t>(kc)) * total;
        for (std::size_t b = 0; b < g.batch; ++b) {
          const T* plane = x + (b * g.cin + ci) * pos;
          T* dst = row + b * pos;
          for (long r = 0; r < h; ++r) {
            T* out = dst + r * w;
            const long rr = r + dr;
            if (rr < 0 || rr >= h) {
              std::fill(out, out + w, T{0});
              continue;
            }
            const T* src = plane + rr * w;
            const long c0 = std::max(0L, -static_cast<long>(dc));
            const long c1 = std::min(w, w - dc);
            for (long c = 0; c < c0; ++c) out[c] = T{0};
            if (c1 > c0) std::memcpy(out + c0, src + c0 + dc, static_cast<std::size_t>(c1 - c0) * sizeof(T));
            for (long c = std::max(c0, c1); c < w; ++c) out[c] = T{0};
          }
        }
      }
    }
  }
}

// Adjoint of im2col: accumulates into gx.
template <class T>
void col2im(const T* cols, const ConvGeometry& g, T* gx) {
  const std::size_t pos = g.pos(), total = g.batch * pos;
  const int kh = g.dims == 1 ? 1 : 3;
  const auto h = static_cast<long>(g.height), w = static_cast<long>(g.width);
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    for (int kr = 0; kr < kh; ++kr) {
      for (int kc = 0; kc < 3; ++kc) {
        const int dr = g.dims == 1 ? 0 : kr - 1, dc = kc - 1;
        const T* row = cols + ((ci * static_cast<std::size_t>(kh) + static_cast<std::size_t>(kr)) * 3 +
                               static_cast<std::size_t>(kc)) * total;
        for (std::size_t b = 0; b < g.batch; ++b) {
          T* plane = gx + (b * g.cin + ci) * pos;
          const T* src = row + b * pos;
          for (long r = 0; r < h; ++r) {
            const long rr = r + dr;
            if (rr < 0 || rr >= h) continue;
            const T* in = src + r * w;
            T* out = plane + rr * w;
            const long c0 = std::max(0L, -static_cast<long>(dc));
            const long c1 = std::min(w, w - dc);
            for (long c = c0; c < c1; ++c) out[c + dc] += in[c];
          }
        }
      }
    }
  }
}

// Reorders [C, B*P] <-> [B, C, P].
template <class T>
void channel_major_to_batch(const T* src, std::size_t channels,
                            std::size_t batch, std::size_t pos, T* dst) {
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(dst + (b * channels + c) * pos, src + (c * batch + b) * pos, pos * sizeof(T));
}
template <class T>
void batch_to_channel_major(const T* src, std::size_t channels,
                            std::size_t batch, std::size_t pos, T* dst) {
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(dst + (c * batch + b) * pos, src + (b * channels + c) * pos, pos * sizeof(T));
}

// Returns y; `cols_out`, when given, receives the im2col buffer for reuse
// in the backward pass.
template <class T>
Tensor<T> conv_forward(const Tensor<T>& x, const Tensor<T>& kernel,
                       const Tensor<T>& bias, AlignedVector<T>* cols_out = nullptr) {
  const ConvGeometry g = conv_geometry<T>(x.shape(), kernel.shape(), bias.size());
  const std::size_t k = g.cin * g.taps(), total = g.batch * g.pos();
  AlignedVector<T> cols(k * total);
  im2col(x.data(), g, cols.data());
  CMapR<T> km(kernel.data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(k));
  CMapR<T> cm(cols.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(total));
  Shape out_shape = x.shape();
  out_shape[1] = g.cout;
  Tensor<T> y(out_shape);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias.data(), static_cast<Eigen::Index>(g.cout));
  if (g.batch == 1) {
    MapR<T> ym(y.data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(total));
    ym.noalias() = km * cm;
    ym.colwise() += b;
  } else {
    RowMat<T> ym = km * cm;
    ym.colwise() += b;
    channel_major_to_batch(ym.data(), g.cout, g.batch, g.pos(), y.data());
  }
  if (cols_out) *cols_out = std::move(cols);
  return y;
}

template <class T>
void conv_backward(const Tensor<T>& x, const Tensor<T>& kernel,
                   const AlignedVector<T>& cols, const Tensor<T>& grad_y,
                   Tensor<T>* grad_x, Tensor<T>* grad_k, Tensor<T>* grad_b) {
  const ConvGeometry g = conv_geometry<T>(x.shape(), kernel.shape(), kernel.extent(0));
  const std::size_t k = g.cin * g.taps(), total = g.batch * g.pos();
  RowMat<T> gy(static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(total));
  batch_to_channel_major(grad_y.data(), g.cout, g.batch, g.pos(), gy.data());
  CMapR<T> cm(cols.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(total));
  CMapR<T> km(kernel.data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(k));
  if (grad_k) {
    MapR<T> gk(grad_k->data(), static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(k));
    gk.noalias() += gy * cm.transpose();
  }
  if (grad_b) {
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> gb(grad_b->data(), static_cast<Eigen::Index>(g.cout));
    gb += gy.rowwise().sum();
  }
  if (grad_x) {
    RowMat<T> gcols = km.transpose() * gy;
    col2im(gcols.data(), g, grad_x->data());
  }
}

// ---- pointwise ------------------------------------------------------

template <class T>
inline T sigmoid(T v) {
  return T{1} / (T{1} + std::exp(-v));
}

template <class T>
Tensor<T> silu_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * sigmoid(x[i]);
  return y;
}

template <class T>
void silu_backward(const Tensor<T>& x, const Tensor<T>& gy, Tensor<T>& gx) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T s = sigmoid(x[i]);
    gx[i] += gy[i] * s * (T{1} + x[i] * (T{1} - s));
  }
}

}  // namespace wlc::kernels
