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

#ifndef VOXC_TENSOR_HPP_
#define VOXC_TENSOR_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace voxc {

class Rng;

// One recorded node of the evaluation tape: a value buffer plus, when any
// input tracks gradients, the local backward rule and input references.
// Ops whose inputs are all constant record neither, so inference builds no
// graph at all.
struct TensorNode {
  std::vector<int64_t> shape;
  std::vector<double> values;
  std::vector<double> grad;  // sized lazily on first accumulation
  bool requires_grad = false;
  std::string op;  // empty for leaves
  std::vector<std::shared_ptr<TensorNode>> inputs;
  std::function<void(TensorNode&)> backward;

  int64_t size() const { return static_cast<int64_t>(values.size()); }
  bool is_leaf() const { return !backward; }
  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  }
};

// Value-semantics handle onto a node. Copies share the node; ops never
// mutate their inputs.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int64_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<int64_t> shape, double value,
                     bool requires_grad = false);
  static Tensor from_values(std::vector<int64_t> shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  // i.i.d. N(0, stddev^2) entries drawn from rng.
  static Tensor randn(std::vector<int64_t> shape, Rng& rng, double stddev,
                      bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int64_t>& shape() const;
  int rank() const;
  int64_t dim(int axis) const;
  int64_t size() const;

  const std::vector<double>& values() const;
  // In-place access for leaf tensors (parameter updates). Forbidden on op
  // outputs to keep the recorded graph consistent.
  std::vector<double>& mutable_values();
  double item() const;  // value of a single-element tensor

  bool requires_grad() const;
  // Accumulated gradient; zeros if backward never reached this tensor.
  std::vector<double> grad() const;
  void zero_grad();

  const std::shared_ptr<TensorNode>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<TensorNode> node_;
};

// Reverse accumulation from a scalar loss. Fills gradients of every tensor
// with requires_grad reachable from the loss; each recorded node's rule runs
// exactly once, in reverse topological order. Leaf gradients accumulate
// across calls; use zero_grad between optimization steps.
void backward(const Tensor& loss);

// Number of recorded (non-leaf) nodes reachable from `root`; test hook for
// the tape invariants.
int64_t graph_size(const Tensor& root);

int64_t numel(const std::vector<int64_t>& shape);

}  // namespace voxc

#endif  // VOXC_TENSOR_HPP_
