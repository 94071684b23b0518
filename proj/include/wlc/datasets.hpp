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
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "wlc/io.hpp"
#include "wlc/rng.hpp"
#include "wlc/tensor.hpp"
#include "wlc/wavelet.hpp"

namespace wlc {

// ---- directory datasets --------------------------------------------------

struct Dataset {
  Kind kind = Kind::k2D;
  std::vector<std::string> paths;
  std::vector<Tensor<float>> signals;  // [C, spatial...] in [-1, 1]
  std::vector<std::size_t> train;      // indices into signals
  std::vector<std::size_t> held_out;
};

inline bool has_extension(const std::filesystem::path& p, Kind kind) {
  const std::string e = p.extension().string();
  return kind == Kind::k2D ? (e == ".ppm" || e == ".pgm") : e == ".wav";
}

inline Tensor<float> load_signal(const std::string& path, Kind kind) {
  return kind == Kind::k2D ? load_image(path) : load_wav(path).samples;
}

// Seeded permutation of [0, n) split so the last `held_out_fraction` goes
// to the held-out side. At least one item lands on each side when n >= 2.
inline void split_indices(std::size_t n, double held_out_fraction, std::uint64_t seed,
                          std::vector<std::size_t>& train, std::vector<std::size_t>& held_out) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  rng.shuffle(order.begin(), order.end());
  auto h = static_cast<std::size_t>(std::llround(held_out_fraction * static_cast<double>(n)));
  if (n >= 2) h = std::clamp<std::size_t>(h, 1, n - 1);
  else h = 0;
  train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(h));
  held_out.assign(order.end() - static_cast<std::ptrdiff_t>(h), order.end());
}

// Loads every matching file in `dir` (sorted by name).
inline Dataset load_dataset(const std::string& dir, Kind kind, double held_out_fraction = 0.1,
                            std::uint64_t seed = 0) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  Dataset d;
  d.kind = kind;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && has_extension(e.path(), kind)) d.paths.push_back(e.path().string());
  }
  std::sort(d.paths.begin(), d.paths.end());
  if (d.paths.empty()) throw IoError("no " + std::string(kind == Kind::k2D ? "PPM/PGM" : "WAV") + " files in " + dir);
  for (const auto& p : d.paths) d.signals.push_back(load_signal(p, kind));
  split_indices(d.signals.size(), held_out_fraction, seed, d.train, d.held_out);
  return d;
}

// Copies the block of `extents` starting at `origin` (spatial axes only).
inline Tensor<float> extract_block(const Tensor<float>& s, const Shape& origin, const Shape& extents) {
  Shape out{s.extent(0)};
  out.insert(out.end(), extents.begin(), extents.end());
  Tensor<float> r(out);
  if (s.rank() == 2) {
    for (std::size_t c = 0; c < s.extent(0); ++c)
      std::copy_n(s.data() + c * s.extent(1) + origin[0], extents[0], r.data() + c * extents[0]);
    return r;
  }
  const std::size_t h = s.extent(1), w = s.extent(2);
  for (std::size_t c = 0; c < s.extent(0); ++c)
    for (std::size_t y = 0; y < extents[0]; ++y)
      std::copy_n(s.data() + (c * h + origin[0] + y) * w + origin[1], extents[1],
                  r.data() + (c * extents[0] + y) * extents[1]);
  return r;
}

// Draws `count` uniformly placed crops of spatial size `extents` from the
// signals named by `indices`. Signals smaller than the crop are reflection
// padded first.
inline std::vector<Tensor<float>> random_crops(const std::vector<Tensor<float>>& signals,
                                               const std::vector<std::size_t>& indices,
                                               std::size_t count, const Shape& extents, Rng& rng) {
  if (indices.empty()) throw ParameterError("random_crops: no source signals");
  std::vector<Tensor<float>> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const Tensor<float>* s = &signals[indices[rng.below(indices.size())]];
    if (s->rank() != extents.size() + 1) throw ShapeError("random_crops: crop rank does not match signal");
    Tensor<float> grown;
    bool small = false;
    for (std::size_t a = 0; a < extents.size(); ++a) small |= s->extent(a + 1) < extents[a];
    if (small) {
      Shape target = s->shape();
      for (std::size_t a = 0; a < extents.size(); ++a) target[a + 1] = std::max(target[a + 1], extents[a]);
      grown = reflect_pad(*s, target);
      s = &grown;
    }
    Shape origin(extents.size());
    for (std::size_t a = 0; a < extents.size(); ++a) origin[a] = rng.below(s->extent(a + 1) - extents[a] + 1);
    out.push_back(extract_block(*s, origin, extents));
  }
  return out;
}

// ---- synthetic signals -----------------------------------------------------

namespace detail {

// Bilinearly upsampled random lattice with `cells` cells across, sampled on
// an h x w grid.
inline void add_lattice(std::vector<double>& f, std::size_t h, std::size_t w, double cells,
                        double amplitude, Rng& rng) {
  const std::size_t gh = static_cast<std::size_t>(std::ceil(cells * static_cast<double>(h) / static_cast<double>(w))) + 2;
  const std::size_t gw = static_cast<std::size_t>(std::ceil(cells)) + 2;
  std::vector<double> g(gh * gw);
  for (auto& v : g) v = rng.normal();
  const double step = cells / static_cast<double>(w);
  const double ox = rng.uniform(), oy = rng.uniform();
  for (std::size_t y = 0; y < h; ++y) {
    const double gy = static_cast<double>(y) * step + oy;
    const auto y0 = static_cast<std::size_t>(gy);
    const double ty = gy - static_cast<double>(y0);
    const double sy = ty * ty * (3.0 - 2.0 * ty);
    for (std::size_t x = 0; x < w; ++x) {
      const double gx = static_cast<double>(x) * step + ox;
      const auto x0 = static_cast<std::size_t>(gx);
      const double tx = gx - static_cast<double>(x0);
      const double sx = tx * tx * (3.0 - 2.0 * tx);
      const double a = g[y0 * gw + x0], b = g[y0 * gw + x0 + 1];
      const double c = g[(y0 + 1) * gw + x0], d = g[(y0 + 1) * gw + x0 + 1];
      f[y * w + x] += amplitude * ((a * (1 - sx) + b * sx) * (1 - sy) + (c * (1 - sx) + d * sx) * sy);
    }
  }
}

inline double smoothstep_edge(double d, double softness) {
  const double t = std::clamp(0.5 - d / softness, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace detail

// Photograph-like RGB test image in [-1, 1]: a roughly 1/f multi-octave
// background, a few hard-edged occluding shapes, fine texture, and colour
// channels that are strongly correlated with luminance.
inline Tensor<float> synth_image(std::size_t h, std::size_t w, Rng& rng) {
  const std::size_t n = h * w;
  std::vector<double> lum(n, 0.0);
  for (int o = 0; o < 7; ++o) {
    const double cells = 2.0 * std::pow(2.0, o);
    if (cells > static_cast<double>(w) / 1.5) break;
    detail::add_lattice(lum, h, w, cells, 0.3 * std::pow(0.7, o), rng);
  }
  std::vector<double> chroma_a(n, 0.0), chroma_b(n, 0.0);
  detail::add_lattice(chroma_a, h, w, 3.0, 0.12, rng);
  detail::add_lattice(chroma_b, h, w, 3.0, 0.12, rng);

  const double base_a = rng.uniform(-0.25, 0.25), base_b = rng.uniform(-0.25, 0.25);
  for (std::size_t i = 0; i < n; ++i) {
    chroma_a[i] += base_a;
    chroma_b[i] += base_b;
  }

  // Occluding shapes: discs, rotated rectangles, half-planes.
  const int shapes = 3 + static_cast<int>(rng.below(6));
  for (int s = 0; s < shapes; ++s) {
    const int type = static_cast<int>(rng.below(3));
    const double cx = rng.uniform() * static_cast<double>(w), cy = rng.uniform() * static_cast<double>(h);
    const double size = (0.05 + 0.3 * rng.uniform()) * static_cast<double>(std::min(h, w));
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double aspect = rng.uniform(0.3, 1.0);
    const double l = rng.uniform(-0.8, 0.8), a = rng.uniform(-0.3, 0.3), b = rng.uniform(-0.3, 0.3);
    const double grad = rng.uniform(-0.01, 0.01);
    const double soft = rng.uniform() < 0.7 ? 1.0 : rng.uniform(2.0, 6.0);
    const double stripe_f = rng.uniform() < 0.3 ? rng.uniform(0.15, 0.6) : 0.0;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double dx = static_cast<double>(x) + 0.5 - cx, dy = static_cast<double>(y) + 0.5 - cy;
        const double u = ca * dx + sa * dy, v = -sa * dx + ca * dy;
        double d;
        if (type == 0) d = std::hypot(u, v / aspect) - size;
        else if (type == 1) d = std::max(std::abs(u) - size, std::abs(v) - size * aspect);
        else d = u;
        const double alpha = detail::smoothstep_edge(d, soft);
        if (alpha <= 0.0) continue;
        const std::size_t i = y * w + x;
        double shade = l + grad * v;
        if (stripe_f > 0.0) shade += 0.15 * std::sin(stripe_f * v);
        lum[i] = (1 - alpha) * lum[i] + alpha * shade;
        chroma_a[i] = (1 - alpha) * chroma_a[i] + alpha * a;
        chroma_b[i] = (1 - alpha) * chroma_b[i] + alpha * b;
      }
    }
  }

  // Surface detail over everything, including the shapes.
  const double detail_gain = rng.uniform(0.2, 1.0);
  std::vector<double> fine(n, 0.0);
  for (int o = 3; o < 8; ++o) {
    const double cells = std::pow(2.0, o);
    if (cells > static_cast<double>(w) / 1.5) break;
    detail::add_lattice(fine, h, w, cells, 0.06 * detail_gain, rng);
  }
  for (std::size_t i = 0; i < n; ++i) lum[i] += fine[i];

  // Sensor-like fine grain.
  const double grain = rng.uniform(0.0, 0.02);
  Tensor<float> img({3, h, w});
  for (std::size_t i = 0; i < n; ++i) {
    const double y = lum[i] + grain * rng.normal();
    const double r = y + 1.2 * chroma_a[i];
    const double g = y - 0.35 * chroma_a[i] - 0.35 * chroma_b[i];
    const double bl = y + 1.3 * chroma_b[i];
    img[i] = static_cast<float>(std::clamp(r, -1.0, 1.0));
    img[n + i] = static_cast<float>(std::clamp(g, -1.0, 1.0));
    img[2 * n + i] = static_cast<float>(std::clamp(bl, -1.0, 1.0));
  }
  return img;
}

// Music-like stereo clip in [-1, 1]: a few enveloped harmonic notes, a
// noisy percussive track and mild inter-channel panning.
inline Tensor<float> synth_audio(std::size_t channels, std::size_t n, double sample_rate, Rng& rng) {
  std::vector<double> mono(n, 0.0), side(n, 0.0);
  const int notes = 4 + static_cast<int>(rng.below(8));
  for (int k = 0; k < notes; ++k) {
    const double f0 = 110.0 * std::pow(2.0, rng.uniform(0.0, 4.0));
    const auto start = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    const double decay = rng.uniform(2.0, 12.0);
    const double amp = rng.uniform(0.05, 0.2);
    const double pan = rng.uniform(-0.5, 0.5);
    for (std::size_t t = start; t < n; ++t) {
      const double s = static_cast<double>(t - start) / sample_rate;
      const double env = std::exp(-decay * s) * std::min(1.0, s * 200.0);
      if (env < 1e-4) break;
      double v = 0.0;
      for (int hmn = 1; hmn <= 6; ++hmn) v += std::sin(2.0 * std::numbers::pi * f0 * hmn * s) / (hmn * hmn);
      mono[t] += amp * env * v;
      side[t] += amp * env * v * pan;
    }
  }
  const int hits = static_cast<int>(rng.below(6));
  for (int k = 0; k < hits; ++k) {
    const auto start = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    double lp = 0.0;
    for (std::size_t t = start; t < n; ++t) {
      const double env = std::exp(-40.0 * static_cast<double>(t - start) / sample_rate);
      if (env < 1e-4) break;
      lp = 0.6 * lp + 0.4 * rng.normal();
      mono[t] += 0.15 * env * lp;
    }
  }
  Tensor<float> out({channels, n});
  for (std::size_t c = 0; c < channels; ++c) {
    const double sign = channels == 1 ? 0.0 : (c == 0 ? 1.0 : -1.0);
    for (std::size_t t = 0; t < n; ++t) {
      out[c * n + t] = static_cast<float>(std::clamp(mono[t] + sign * side[t], -1.0, 1.0));
    }
  }
  return out;
}

// Writes `count` synthetic signals into `dir` as img_NNNN.ppm or
// clip_NNNN.wav. Returns the written paths.
inline std::vector<std::string> write_synthetic_dataset(const std::string& dir, Kind kind, std::size_t count,
                                                        const Shape& extents, std::uint64_t seed,
                                                        std::size_t channels = 0) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Rng rng(seed);
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, kind == Kind::k2D ? "img_%04zu.ppm" : "clip_%04zu.wav", i);
    const std::string p = (fs::path(dir) / name).string();
    if (kind == Kind::k2D) {
      write_image(p, synth_image(extents.at(0), extents.at(1), rng));
    } else {
      write_wav(p, Audio{synth_audio(channels ? channels : 2, extents.at(0), 44100.0, rng), 44100});
    }
    paths.push_back(p);
  }
  return paths;
}

}  // namespace wlc
