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

// Random container cases shared by the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <cmath>

#include "wlc/bitstream.hpp"
#include "wlc/rng.hpp"

namespace wlc::fuzz {

// One latent channel: constant, uniform over the full range, or a
// heavy-tailed peak around zero with a random scale.
inline void fill_channel(std::int8_t* out, std::size_t n, Rng& rng) {
  const auto mode = rng.below(4);
  const double scale = std::exp(rng.uniform(-2.0, 4.0));
  const auto level = static_cast<std::int8_t>(static_cast<int>(rng.below(255)) - 127);
  for (std::size_t i = 0; i < n; ++i) {
    double v;
    switch (mode) {
      case 0: v = level; break;
      case 1: v = static_cast<double>(rng.below(255)) - 127.0; break;
      case 2: v = scale * rng.normal(); break;
      default: {
        const double u = rng.uniform(-0.5, 0.5);
        v = -scale * std::copysign(std::log(1.0 - 2.0 * std::abs(u) + 1e-300), u);
      }
    }
    out[i] = static_cast<std::int8_t>(std::clamp(std::lround(v), -127L, 127L));
  }
}

inline Container random_container(Rng& rng) {
  Container c;
  ContainerHeader& h = c.header;
  h.kind = rng.below(2) ? Kind::k2D : Kind::k1D;
  h.levels = static_cast<int>(rng.below(h.kind == Kind::k2D ? 4 : 6));
  h.channels = 1 + rng.below(3);
  const std::size_t cz = 1 + rng.below(12);
  const std::size_t d = h.kind == Kind::k2D ? 2 : 1;
  const std::size_t block = std::size_t{1} << h.levels;
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t latent = 1 + rng.below(d == 2 ? 8 : 40);
    h.padded.push_back(latent * block);
    h.original.push_back(h.padded.back() - rng.below(block));
  }
  for (std::size_t k = 0; k < cz; ++k) h.sigma.push_back(static_cast<float>(std::exp(rng.uniform(-3.0, 3.0))));
  c.latent = Tensor<std::int8_t>(h.latent_shape());
  const std::size_t plane = c.latent.size() / cz;
  for (std::size_t k = 0; k < cz; ++k) fill_channel(c.latent.data() + k * plane, plane, rng);
  return c;
}

}  // namespace wlc::fuzz
