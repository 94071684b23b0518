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

// Reverse-mode differentiation over a recorded list of operations.
//
// Each op appends a node holding its forward value and a closure that,
// given the node's accumulated gradient, adds contributions to the
// gradients of its inputs. Parameters are leaves whose gradients are also
// accumulated into the owning Parameter when backward() runs.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wlc/tensor.hpp"

namespace wlc {

struct NumericError : Error {
  using Error::Error;
};
struct NonDifferentiableError : Error {
  using Error::Error;
};

template <class T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Tensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape(), T{0}) {}

  void zero_grad() { grad = Tensor<T>(value.shape(), T{0}); }
};

struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

template <class T>
bool all_finite(const Tensor<T>& t) {
  for (const T& v : t) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <class T>
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor<T>& grad)>;

  Var constant(Tensor<T> value) { return push(std::move(value), "constant", {}, {}, false, true); }

  // Leaf that receives a gradient (readable through grad()).
  Var input(Tensor<T> value) {
    Var v = push(std::move(value), "input", {}, {}, true, true);
    return v;
  }

  Var parameter(Parameter<T>& p) {
    Var v = push(p.value, "parameter:" + p.name, {}, {}, true, true);
    nodes_[v.id].param = &p;
    return v;
  }

  // Appends an op node. `inputs` decides whether the node needs a gradient;
  // `backward` may be empty only when no input needs one.
  Var record(Tensor<T> value, std::string op, std::initializer_list<Var> inputs,
             Backward backward, bool differentiable = true) {
    bool needs = false;
    for (Var in : inputs) needs = needs || node(in).needs_grad;
    if (!all_finite(value)) {
      throw NumericError("non-finite value produced by op '" + op + "'");
    }
    return push(std::move(value), std::move(op), std::vector<Var>(inputs),
                std::move(backward), needs, differentiable);
  }

  const Tensor<T>& value(Var v) const { return node(v).value; }
  const Shape& shape(Var v) const { return node(v).value.shape(); }
  bool needs_grad(Var v) const { return node(v).needs_grad; }

  const Tensor<T>& grad(Var v) const {
    const auto& n = node(v);
    if (n.grad.empty() && !n.value.empty()) {
      throw StateError("no gradient recorded for node " + std::to_string(v.id));
    }
    return n.grad;
  }

  // Gradient buffer of an input, allocated on first use. Backward closures
  // accumulate into it.
  Tensor<T>& grad_buffer(Var v) {
    auto& n = node(v);
    if (n.grad.empty()) n.grad = Tensor<T>(n.value.shape(), T{0});
    return n.grad;
  }

  // Name of the first op on the gradient path from `root` that has no
  // derivative, or an empty string when the graph is differentiable.
  std::string non_differentiable_op(Var root) const {
    std::vector<bool> live(nodes_.size(), false);
    live[node(root).id] = true;
    for (std::size_t i = root.id + 1; i-- > 0;) {
      if (!live[i]) continue;
      const auto& n = nodes_[i];
      if (!n.needs_grad) continue;
      if (!n.differentiable) return n.op;
      for (Var in : n.inputs) live[in.id] = true;
    }
    return {};
  }

  void backward(Var root) {
    if (nodes_.empty() || !root.valid() || root.id >= nodes_.size()) {
      throw StateError("backward called without a recorded forward pass");
    }
    auto& r = nodes_[root.id];
    if (r.value.size() != 1) {
      throw ShapeError("backward root must be a scalar, got " +
                       shape_string(r.value.shape()));
    }
    if (auto bad = non_differentiable_op(root); !bad.empty()) {
      throw NonDifferentiableError("op '" + bad +
                                   "' has no derivative but lies on the gradient path");
    }
    for (auto& n : nodes_) n.grad = Tensor<T>();
    r.grad = Tensor<T>(r.value.shape(), T{1});
    for (std::size_t i = root.id + 1; i-- > 0;) {
      auto& n = nodes_[i];
      if (!n.needs_grad || n.grad.empty()) continue;
      if (!all_finite(n.grad)) {
        throw NumericError("non-finite gradient at op '" + n.op + "'");
      }
      if (n.param != nullptr) {
        auto& pg = n.param->grad;
        if (pg.shape() != n.grad.shape()) pg = Tensor<T>(n.grad.shape(), T{0});
        for (std::size_t k = 0; k < pg.size(); ++k) pg[k] += n.grad[k];
      }
      if (n.backward) {
        // Copy: the closure may allocate buffers and invalidate references.
        const Tensor<T> g = n.grad;
        auto fn = n.backward;
        fn(*this, g);
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    std::size_t id = 0;
    Tensor<T> value;
    Tensor<T> grad;
    std::string op;
    std::vector<Var> inputs;
    Backward backward;
    Parameter<T>* param = nullptr;
    bool needs_grad = false;
    bool differentiable = true;
  };

  Var push(Tensor<T> value, std::string op, std::vector<Var> inputs,
           Backward backward, bool needs, bool differentiable) {
    Node n;
    n.id = nodes_.size();
    n.value = std::move(value);
    n.op = std::move(op);
    n.inputs = std::move(inputs);
    n.backward = std::move(backward);
    n.needs_grad = needs;
    n.differentiable = differentiable;
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  Node& node(Var v) {
    if (!v.valid() || v.id >= nodes_.size()) {
      throw StateError("variable does not belong to this tape");
    }
    return nodes_[v.id];
  }
  const Node& node(Var v) const {
    if (!v.valid() || v.id >= nodes_.size()) {
      throw StateError("variable does not belong to this tape");
    }
    return nodes_[v.id];
  }

  std::vector<Node> nodes_;
};

}  // namespace wlc
