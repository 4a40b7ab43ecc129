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

#ifndef VOXC_OPS_HPP_
#define VOXC_OPS_HPP_

#include <vector>

#include "voxc/tensor.hpp"

// Differentiable primitives. Every op returns a fresh tensor, registers its
// backward rule when any input tracks gradients, and fails fast (with the op
// name) if the result contains a non-finite value.
namespace voxc::ops {

// a + b for identical shapes, or b a 1-D vector broadcast across the rows of
// a 2-D a.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise, identical shapes
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);  // requires strictly positive input
// Elementwise a^p for constant p; domain errors (negative base with fractional
// exponent, zero with negative exponent) are rejected.
Tensor power(const Tensor& a, double p);
// x * log(x) with the 0 -> 0 continuation (gradient clamped to 0 there).
Tensor xlogx(const Tensor& a);
// Exact erf-based GELU: x * Phi(x).
Tensor gelu(const Tensor& a);

Tensor matmul(const Tensor& a, const Tensor& b);  // [R,K] @ [K,C]
Tensor transpose(const Tensor& a);                // 2-D

Tensor sum_all(const Tensor& a);   // -> scalar
Tensor mean_all(const Tensor& a);  // -> scalar
Tensor sum_axis(const Tensor& a, int axis);   // 2-D -> 1-D
Tensor mean_axis(const Tensor& a, int axis);  // 2-D -> 1-D

Tensor row_softmax(const Tensor& a);       // 2-D, each row sums to 1
Tensor log_softmax_rows(const Tensor& a);  // 2-D, stable log softmax per row

// Per-row normalization over the last axis (population variance, eps-guarded)
// followed by the affine gamma * xhat + beta. gamma/beta are 1-D of the row
// width.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps);

// Valid (unpadded) 1-D convolution: x is [C_in, L], w is [C_out, C_in, k],
// bias is [C_out]; output [C_out, floor((L - k) / stride) + 1].
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& bias, int64_t stride);

// Same data, new extents (element count preserved).
Tensor reshape(const Tensor& a, std::vector<int64_t> shape);
Tensor slice_rows(const Tensor& a, int64_t start, int64_t len);
Tensor slice_cols(const Tensor& a, int64_t start, int64_t len);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
// Row `i` of the output is row indices[i] of the table; gradients scatter
// back into the looked-up rows.
Tensor embedding_rows(const Tensor& table, const std::vector<int64_t>& indices);
// Replaces the listed rows of x with the shared vector `emb`; other rows pass
// through untouched.
Tensor mask_rows(const Tensor& x, const std::vector<int64_t>& rows, const Tensor& emb);
// Same values, no gradient flow.
Tensor detach(const Tensor& a);

// Non-differentiable helpers.
std::vector<int64_t> argmax_rows(const Tensor& a);
double reduce_max(const Tensor& a);

}  // namespace voxc::ops

#endif  // VOXC_OPS_HPP_
