// Copyright (c) 2026 voxc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxc/tensor.hpp"

#include <unordered_set>

#include "voxc/error.hpp"
#include "voxc/rng.hpp"

namespace voxc {

int64_t numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (const int64_t d : shape) {
    require(d > 0, "tensor shape extents must be positive, got ", d);
    n *= d;
  }
  return n;
}

Tensor Tensor::zeros(std::vector<int64_t> shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<int64_t> shape, double value, bool requires_grad) {
  const int64_t n = numel(shape);
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->values.assign(static_cast<size_t>(n), value);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from_values(std::vector<int64_t> shape, std::vector<double> values,
                           bool requires_grad) {
  const int64_t n = numel(shape);
  require(n == static_cast<int64_t>(values.size()), "from_values: shape wants ", n,
          " values, got ", values.size());
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_values({1}, {value}, requires_grad);
}

Tensor Tensor::randn(std::vector<int64_t> shape, Rng& rng, double stddev,
                     bool requires_grad) {
  const int64_t n = numel(shape);
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = stddev * rng.normal();
  return from_values(std::move(shape), std::move(v), requires_grad);
}

const std::vector<int64_t>& Tensor::shape() const {
  require(defined(), "shape() on undefined tensor");
  return node_->shape;
}

int Tensor::rank() const { return static_cast<int>(shape().size()); }

int64_t Tensor::dim(int axis) const {
  const auto& s = shape();
  require(axis >= 0 && axis < static_cast<int>(s.size()), "dim: axis ", axis,
          " out of range for rank ", s.size());
  return s[static_cast<size_t>(axis)];
}

int64_t Tensor::size() const {
  require(defined(), "size() on undefined tensor");
  return node_->size();
}

const std::vector<double>& Tensor::values() const {
  require(defined(), "values() on undefined tensor");
  return node_->values;
}

std::vector<double>& Tensor::mutable_values() {
  require(defined(), "mutable_values() on undefined tensor");
  require(node_->is_leaf(), "mutable_values() is only allowed on leaf tensors, not '",
          node_->op, "' outputs");
  return node_->values;
}

double Tensor::item() const {
  require(defined() && size() == 1, "item() requires a single-element tensor");
  return node_->values[0];
}

bool Tensor::requires_grad() const { return defined() && node_->requires_grad; }

std::vector<double> Tensor::grad() const {
  require(defined(), "grad() on undefined tensor");
  if (node_->grad.size() != node_->values.size()) {
    return std::vector<double>(node_->values.size(), 0.0);
  }
  return node_->grad;
}

void Tensor::zero_grad() {
  require(defined(), "zero_grad() on undefined tensor");
  node_->grad.assign(node_->values.size(), 0.0);
}

namespace {

// Post-order over gradient-tracked nodes; result has every op's inputs before
// the op itself.
std::vector<TensorNode*> topo_order(TensorNode* root) {
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  struct Frame {
    TensorNode* node;
    size_t next_input;
  };
  std::vector<Frame> stack;
  if (root->requires_grad) stack.push_back({root, 0});
  visited.insert(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_input < f.node->inputs.size()) {
      TensorNode* in = f.node->inputs[f.next_input++].get();
      if (in->requires_grad && visited.insert(in).second) {
        stack.push_back({in, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

void backward(const Tensor& loss) {
  require(loss.defined(), "backward: undefined loss");
  require(loss.size() == 1, "backward: loss must be scalar, got ", loss.size(),
          " elements");
  require(loss.requires_grad(),
          "backward: loss is detached from every gradient-tracked input");

  TensorNode* root = loss.node().get();
  const std::vector<TensorNode*> order = topo_order(root);

  // Interior gradients are per-call scratch; leaf gradients accumulate.
  for (TensorNode* n : order) {
    if (!n->is_leaf()) n->grad.assign(n->values.size(), 0.0);
  }
  root->ensure_grad();
  root->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* n = *it;
    if (n->backward) n->backward(*n);
  }
}

int64_t graph_size(const Tensor& root) {
  require(root.defined(), "graph_size: undefined tensor");
  std::unordered_set<TensorNode*> visited;
  std::vector<TensorNode*> stack{root.node().get()};
  visited.insert(root.node().get());
  int64_t ops = 0;
  while (!stack.empty()) {
    TensorNode* n = stack.back();
    stack.pop_back();
    if (!n->is_leaf()) ++ops;
    for (const auto& in : n->inputs) {
      if (visited.insert(in.get()).second) stack.push_back(in.get());
    }
  }
  return ops;
}

}  // namespace voxc
