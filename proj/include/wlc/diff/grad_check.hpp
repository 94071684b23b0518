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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wlc/diff/tape.hpp"
#include "wlc/rng.hpp"

namespace wlc {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
  std::string worst_parameter;
};

struct GradCheckOptions {
  std::size_t probes = 10;
  double step = 1e-4;
  std::uint64_t seed = 0;
  // Denominator floor, so that gradients that are zero up to roundoff on
  // both sides do not produce a spurious ratio.
  double floor = 1e-8;
};

// Compares analytic gradients against central differences on randomly
// chosen elements of `params`. `graph` must rebuild the same deterministic
// scalar loss on the tape it is given each time it is called.
template <class T>
GradCheckResult grad_check(const std::function<Var(Tape<T>&)>& graph,
                           const std::vector<Parameter<T>*>& params,
                           const GradCheckOptions& options = {}) {
  std::size_t total = 0;
  for (auto* p : params) total += p->value.size();
  if (total == 0) throw ParameterError("grad_check: no parameters to probe");

  Tape<T> tape;
  Var loss = graph(tape);
  if (auto bad = tape.non_differentiable_op(loss); !bad.empty()) {
    throw NonDifferentiableError("grad_check: graph contains non-differentiable op '" + bad + "'");
  }
  for (auto* p : params) p->zero_grad();
  tape.backward(loss);

  auto evaluate = [&]() {
    Tape<T> t;
    return static_cast<double>(t.value(graph(t))[0]);
  };

  Rng rng(options.seed);
  GradCheckResult result;
  for (std::size_t k = 0; k < options.probes; ++k) {
    // Pick an element uniformly across all parameters.
    std::uint64_t flat = rng.below(total);
    std::size_t which = 0;
    while (flat >= params[which]->value.size()) {
      flat -= params[which]->value.size();
      ++which;
    }
    auto& p = *params[which];
    const T saved = p.value[flat];
    p.value[flat] = static_cast<T>(saved + options.step);
    const double up = evaluate();
    p.value[flat] = static_cast<T>(saved - options.step);
    const double down = evaluate();
    p.value[flat] = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double analytic = static_cast<double>(p.grad[flat]);
    const double denom = std::max({std::fabs(numeric), std::fabs(analytic), options.floor});
    const double rel = std::fabs(numeric - analytic) / denom;
    if (rel > result.max_relative_error || result.probes == 0) {
      result.worst_parameter = p.name;
    }
    result.max_relative_error = std::max(result.max_relative_error, rel);
    ++result.probes;
  }
  return result;
}

}  // namespace wlc
