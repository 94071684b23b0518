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
#include <cmath>
#include <memory>
#include <vector>

#include "wlc/diff/kernels.hpp"
#include "wlc/diff/tape.hpp"
#include "wlc/normal.hpp"
#include "wlc/wavelet.hpp"

namespace wlc::ops {

template <class T>
Var dense(Tape<T>& tape, Var x, Var weight, Var bias) {
  Tensor<T> y = kernels::dense_forward(tape.value(x), tape.value(weight), tape.value(bias));
  return tape.record(std::move(y), "dense", {x, weight, bias},
                     [x, weight, bias](Tape<T>& t, const Tensor<T>& g) {
                       Tensor<T>* gx = t.needs_grad(x) ? &t.grad_buffer(x) : nullptr;
                       Tensor<T>* gw = t.needs_grad(weight) ? &t.grad_buffer(weight) : nullptr;
                       Tensor<T>* gb = t.needs_grad(bias) ? &t.grad_buffer(bias) : nullptr;
                       kernels::dense_backward(t.value(x), t.value(weight), g, gx, gw, gb);
                     });
}

template <class T>
Var conv(Tape<T>& tape, Var x, Var kernel, Var bias) {
  auto cols = std::make_shared<AlignedVector<T>>();
  Tensor<T> y = kernels::conv_forward(tape.value(x), tape.value(kernel), tape.value(bias), cols.get());
  return tape.record(std::move(y), "conv", {x, kernel, bias},
                     [x, kernel, bias, cols](Tape<T>& t, const Tensor<T>& g) {
                       Tensor<T>* gx = t.needs_grad(x) ? &t.grad_buffer(x) : nullptr;
                       Tensor<T>* gk = t.needs_grad(kernel) ? &t.grad_buffer(kernel) : nullptr;
                       Tensor<T>* gb = t.needs_grad(bias) ? &t.grad_buffer(bias) : nullptr;
                       kernels::conv_backward(t.value(x), t.value(kernel), *cols, g, gx, gk, gb);
                     });
}

template <class T>
Var silu(Tape<T>& tape, Var x) {
  return tape.record(kernels::silu_forward(tape.value(x)), "silu", {x},
                     [x](Tape<T>& t, const Tensor<T>& g) {
                       kernels::silu_backward(t.value(x), g, t.grad_buffer(x));
                     });
}

template <class T>
Var add(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  require_same_shape(av.shape(), bv.shape(), "add");
  Tensor<T> y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  return tape.record(std::move(y), "add", {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    for (Var v : {a, b}) {
      if (!t.needs_grad(v)) continue;
      auto& gv = t.grad_buffer(v);
      for (std::size_t i = 0; i < g.size(); ++i) gv[i] += g[i];
    }
  });
}

// x + c for a tensor c held constant on the tape (training noise).
template <class T>
Var add_constant(Tape<T>& tape, Var x, const Tensor<T>& c) {
  const auto& xv = tape.value(x);
  require_same_shape(xv.shape(), c.shape(), "add_constant");
  Tensor<T> y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] + c[i];
  return tape.record(std::move(y), "add_constant", {x}, [x](Tape<T>& t, const Tensor<T>& g) {
    auto& gx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

// Mean of squared differences; scalar output of shape {1}.
template <class T>
Var mse(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  require_same_shape(av.shape(), bv.shape(), "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = static_cast<double>(av[i]) - static_cast<double>(bv[i]);
    acc += d * d;
  }
  const double n = static_cast<double>(av.size());
  Tensor<T> y({1}, static_cast<T>(acc / n));
  return tape.record(std::move(y), "mse", {a, b}, [a, b, n](Tape<T>& t, const Tensor<T>& g) {
    const auto& av = t.value(a);
    const auto& bv = t.value(b);
    const T scale = static_cast<T>(2.0 / n) * g[0];
    if (t.needs_grad(a)) {
      auto& ga = t.grad_buffer(a);
      for (std::size_t i = 0; i < av.size(); ++i) ga[i] += scale * (av[i] - bv[i]);
    }
    if (t.needs_grad(b)) {
      auto& gb = t.grad_buffer(b);
      for (std::size_t i = 0; i < av.size(); ++i) gb[i] -= scale * (av[i] - bv[i]);
    }
  });
}

// Mean over positions: [B, C, ...] -> [B, C].
template <class T>
Var global_average_pool(Tape<T>& tape, Var x) {
  const auto& xv = tape.value(x);
  kernels::check_activation(xv.shape(), "global_average_pool");
  const std::size_t batch = xv.extent(0), ch = xv.extent(1), pos = kernels::positions(xv.shape());
  Tensor<T> y({batch, ch});
  for (std::size_t i = 0; i < batch * ch; ++i) {
    double acc = 0.0;
    for (std::size_t p = 0; p < pos; ++p) acc += xv[i * pos + p];
    y[i] = static_cast<T>(acc / static_cast<double>(pos));
  }
  return tape.record(std::move(y), "global_average_pool", {x},
                     [x, pos](Tape<T>& t, const Tensor<T>& g) {
                       auto& gx = t.grad_buffer(x);
                       const T inv = T{1} / static_cast<T>(pos);
                       for (std::size_t i = 0; i < g.size(); ++i)
                         for (std::size_t p = 0; p < pos; ++p) gx[i * pos + p] += g[i] * inv;
                     });
}

// Mean binary cross-entropy of logits [B, 1] against 0/1 labels.
template <class T>
Var bce_with_logits(Tape<T>& tape, Var logits, const std::vector<int>& labels) {
  const auto& lv = tape.value(logits);
  if (lv.size() != labels.size()) {
    throw ShapeError("bce_with_logits: " + std::to_string(lv.size()) + " logits vs " +
                     std::to_string(labels.size()) + " labels");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const double z = lv[i];
    // log(1 + exp(-|z|)) + max(z, 0) - z * y
    acc += std::log1p(std::exp(-std::fabs(z))) + std::max(z, 0.0) - z * labels[i];
  }
  const double n = static_cast<double>(lv.size());
  Tensor<T> y({1}, static_cast<T>(acc / n));
  return tape.record(std::move(y), "bce_with_logits", {logits},
                     [logits, labels, n](Tape<T>& t, const Tensor<T>& g) {
                       const auto& lv = t.value(logits);
                       auto& gl = t.grad_buffer(logits);
                       for (std::size_t i = 0; i < lv.size(); ++i) {
                         const double p = 1.0 / (1.0 + std::exp(-static_cast<double>(lv[i])));
                         gl[i] += static_cast<T>((p - labels[i]) / n) * g[0];
                       }
                     });
}

// Packet analysis over [B, C, spatial...]; output [B, C * 2^(J*d), ...].
template <class T>
Var wpt(Tape<T>& tape, Var x, Kind kind, int levels) {
  const Shape in_shape = tape.value(x).shape();
  Tensor<T> planes = tape.value(x);
  Shape flat(in_shape.begin() + 1, in_shape.end());
  flat[0] *= in_shape[0];
  planes.reshape(flat);
  Tensor<T> bands = wpt_analyze_planes(planes, kind, levels);
  Shape out_shape = bands.shape();
  out_shape[0] /= in_shape[0];
  out_shape.insert(out_shape.begin(), in_shape[0]);
  bands.reshape(out_shape);
  return tape.record(std::move(bands), "wpt", {x},
                     [x, kind, levels, in_shape](Tape<T>& t, const Tensor<T>& g) {
                       Tensor<T> gb = g;
                       Shape flat(g.shape().begin() + 1, g.shape().end());
                       flat[0] *= g.extent(0);
                       gb.reshape(flat);
                       Tensor<T> gx = wpt_analyze_adjoint_planes(gb, kind, levels);
                       auto& dst = t.grad_buffer(x);
                       for (std::size_t i = 0; i < gx.size(); ++i) dst[i] += gx[i];
                     });
}

template <class T>
Var iwpt(Tape<T>& tape, Var bands, Kind kind, int levels) {
  const Shape in_shape = tape.value(bands).shape();
  Tensor<T> planes = tape.value(bands);
  Shape flat(in_shape.begin() + 1, in_shape.end());
  flat[0] *= in_shape[0];
  planes.reshape(flat);
  Tensor<T> sig = wpt_synthesize_planes(planes, kind, levels);
  Shape out_shape = sig.shape();
  out_shape[0] /= in_shape[0];
  out_shape.insert(out_shape.begin(), in_shape[0]);
  sig.reshape(out_shape);
  return tape.record(std::move(sig), "iwpt", {bands},
                     [bands, kind, levels](Tape<T>& t, const Tensor<T>& g) {
                       Tensor<T> gs = g;
                       Shape flat(g.shape().begin() + 1, g.shape().end());
                       flat[0] *= g.extent(0);
                       gs.reshape(flat);
                       Tensor<T> gb = wpt_synthesize_adjoint_planes(gs, kind, levels);
                       auto& dst = t.grad_buffer(bands);
                       for (std::size_t i = 0; i < gb.size(); ++i) dst[i] += gb[i];
                     });
}

// Companding with per-channel scale sigma_c = exp(log_scale_c):
//   y = 255 * (Phi(z / sigma) - 0.5)
template <class T>
Var compand(Tape<T>& tape, Var z, Var log_scale) {
  const auto& zv = tape.value(z);
  const auto& ls = tape.value(log_scale);
  kernels::check_activation(zv.shape(), "compand");
  const std::size_t batch = zv.extent(0), ch = zv.extent(1), pos = kernels::positions(zv.shape());
  if (ls.size() != ch) throw ShapeError("compand: scale count does not match channels");
  Tensor<T> y(zv.shape());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < ch; ++c) {
      const double sigma = std::exp(static_cast<double>(ls[c]));
      for (std::size_t p = 0; p < pos; ++p) {
        const std::size_t i = (b * ch + c) * pos + p;
        const T lim = compand_limit<T>();
        y[i] = std::clamp(static_cast<T>(255.0 * (normal_cdf(zv[i] / sigma) - 0.5)), -lim, lim);
      }
    }
  return tape.record(std::move(y), "compand", {z, log_scale},
                     [z, log_scale, batch, ch, pos](Tape<T>& t, const Tensor<T>& g) {
                       const auto& zv = t.value(z);
                       const auto& ls = t.value(log_scale);
                       Tensor<T>* gz = t.needs_grad(z) ? &t.grad_buffer(z) : nullptr;
                       Tensor<T>* gs = t.needs_grad(log_scale) ? &t.grad_buffer(log_scale) : nullptr;
                       for (std::size_t b = 0; b < batch; ++b)
                         for (std::size_t c = 0; c < ch; ++c) {
                           const double sigma = std::exp(static_cast<double>(ls[c]));
                           double acc = 0.0;
                           for (std::size_t p = 0; p < pos; ++p) {
                             const std::size_t i = (b * ch + c) * pos + p;
                             const double u = zv[i] / sigma;
                             const double d = 255.0 * normal_pdf(u);
                             if (gz) (*gz)[i] += static_cast<T>(g[i] * d / sigma);
                             acc -= g[i] * d * u;
                           }
                           if (gs) (*gs)[c] += static_cast<T>(acc);
                         }
                     });
}

// Inverse of compand on (-127.5, 127.5):
//   z = sigma * PhiInv(clamp(y / 255 + 0.5, eps, 1 - eps)),  eps = 1e-6
template <class T>
Var decompand(Tape<T>& tape, Var y, Var log_scale) {
  constexpr double eps = 1e-6;
  const auto& yv = tape.value(y);
  const auto& ls = tape.value(log_scale);
  kernels::check_activation(yv.shape(), "decompand");
  const std::size_t batch = yv.extent(0), ch = yv.extent(1), pos = kernels::positions(yv.shape());
  if (ls.size() != ch) throw ShapeError("decompand: scale count does not match channels");
  Tensor<T> z(yv.shape());
  // Unit-scale quantile, kept for the backward pass.
  auto unit = std::make_shared<std::vector<double>>(yv.size());
  auto clamped = std::make_shared<std::vector<bool>>(yv.size());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < ch; ++c) {
      const double sigma = std::exp(static_cast<double>(ls[c]));
      for (std::size_t p = 0; p < pos; ++p) {
        const std::size_t i = (b * ch + c) * pos + p;
        double prob = static_cast<double>(yv[i]) / 255.0 + 0.5;
        const bool clip = prob < eps || prob > 1.0 - eps;
        prob = std::clamp(prob, eps, 1.0 - eps);
        (*unit)[i] = normal_quantile(prob);
        (*clamped)[i] = clip;
        z[i] = static_cast<T>(sigma * (*unit)[i]);
      }
    }
  return tape.record(std::move(z), "decompand", {y, log_scale},
                     [y, log_scale, batch, ch, pos, unit, clamped](Tape<T>& t, const Tensor<T>& g) {
                       const auto& ls = t.value(log_scale);
                       Tensor<T>* gy = t.needs_grad(y) ? &t.grad_buffer(y) : nullptr;
                       Tensor<T>* gs = t.needs_grad(log_scale) ? &t.grad_buffer(log_scale) : nullptr;
                       for (std::size_t b = 0; b < batch; ++b)
                         for (std::size_t c = 0; c < ch; ++c) {
                           const double sigma = std::exp(static_cast<double>(ls[c]));
                           double acc = 0.0;
                           for (std::size_t p = 0; p < pos; ++p) {
                             const std::size_t i = (b * ch + c) * pos + p;
                             const double q = (*unit)[i];
                             if (gy && !(*clamped)[i]) {
                               (*gy)[i] += static_cast<T>(g[i] * sigma / (255.0 * normal_pdf(q)));
                             }
                             acc += g[i] * sigma * q;
                           }
                           if (gs) (*gs)[c] += static_cast<T>(acc);
                         }
                     });
}

// Hard rounding. Recorded so that graphs containing it can be evaluated,
// but it has no derivative; backward through it is an error.
template <class T>
Var round(Tape<T>& tape, Var x) {
  Tensor<T> y(tape.value(x).shape());
  const auto& xv = tape.value(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::round(xv[i]);
  return tape.record(std::move(y), "round", {x}, {}, false);
}

}  // namespace wlc::ops
