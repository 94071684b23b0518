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

#include <cmath>
#include <string>
#include <vector>

#include "wlc/diff/kernels.hpp"
#include "wlc/diff/ops.hpp"
#include "wlc/diff/tape.hpp"
#include "wlc/rng.hpp"

namespace wlc {

// Zero-mean uniform initialisation on [-1/sqrt(fan_in), 1/sqrt(fan_in)].
template <class T>
void init_uniform(Tensor<T>& t, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t) v = static_cast<T>(rng.uniform(-bound, bound));
}

inline Shape conv_kernel_shape(std::size_t cout, std::size_t cin, int dims) {
  return dims == 1 ? Shape{cout, cin, 3} : Shape{cout, cin, 3, 3};
}

// x + conv_b(silu(conv_a(x))), channel count preserved.
template <class T>
struct ResidualBlock {
  Parameter<T> conv_a_weight, conv_a_bias, conv_b_weight, conv_b_bias;

  ResidualBlock() = default;
  ResidualBlock(const std::string& prefix, std::size_t channels, int dims)
      : conv_a_weight(prefix + ".conv_a.weight", Tensor<T>(conv_kernel_shape(channels, channels, dims))),
        conv_a_bias(prefix + ".conv_a.bias", Tensor<T>({channels})),
        conv_b_weight(prefix + ".conv_b.weight", Tensor<T>(conv_kernel_shape(channels, channels, dims))),
        conv_b_bias(prefix + ".conv_b.bias", Tensor<T>({channels})) {}

  void init(Rng& rng) {
    const std::size_t fan_in = conv_a_weight.value.size() / conv_a_weight.value.extent(0);
    init_uniform(conv_a_weight.value, fan_in, rng);
    init_uniform(conv_b_weight.value, fan_in, rng);
  }

  std::vector<Parameter<T>*> parameters() {
    return {&conv_a_weight, &conv_a_bias, &conv_b_weight, &conv_b_bias};
  }

  Var forward(Tape<T>& tape, Var x) {
    Var h = ops::conv(tape, x, tape.parameter(conv_a_weight), tape.parameter(conv_a_bias));
    h = ops::silu(tape, h);
    h = ops::conv(tape, h, tape.parameter(conv_b_weight), tape.parameter(conv_b_bias));
    return ops::add(tape, x, h);
  }

  Tensor<T> apply(const Tensor<T>& x) const {
    Tensor<T> h = kernels::conv_forward(x, conv_a_weight.value, conv_a_bias.value);
    h = kernels::silu_forward(h);
    h = kernels::conv_forward(h, conv_b_weight.value, conv_b_bias.value);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += x[i];
    return h;
  }
};

}  // namespace wlc
