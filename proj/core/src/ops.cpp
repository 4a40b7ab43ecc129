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

#include "voxc/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "voxc/error.hpp"

namespace voxc::ops {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Builds the output node. When some input tracks gradients the op is recorded
// on the tape (inputs + backward rule); otherwise the graph is pruned and the
// result is a plain leaf.
Tensor make_op(const char* name, std::vector<int64_t> shape,
               std::vector<double> values, std::vector<Tensor> inputs,
               std::function<void(TensorNode&)> bw) {
  for (const double v : values) {
    if (!std::isfinite(v)) fail("op '", name, "': non-finite result");
  }
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  bool rg = false;
  for (const auto& in : inputs) rg = rg || in.requires_grad();
  node->requires_grad = rg;
  if (rg) {
    node->op = name;
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node());
    node->backward = std::move(bw);
  }
  return Tensor(std::move(node));
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape() == b.shape(); }

void check_2d(const Tensor& a, const char* op) {
  require(a.rank() == 2, op, ": expected a 2-D tensor, got rank ", a.rank());
}

// Accumulate helper: adds src into input i's gradient if tracked.
void acc(TensorNode& n, size_t i, const std::vector<double>& src) {
  TensorNode* in = n.inputs[i].get();
  if (!in->requires_grad) return;
  in->ensure_grad();
  for (size_t k = 0; k < src.size(); ++k) in->grad[k] += src[k];
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  if (same_shape(a, b)) {
    std::vector<double> out(a.values());
    const auto& bv = b.values();
    for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return make_op("add", a.shape(), std::move(out), {a, b}, [](TensorNode& n) {
      acc(n, 0, n.grad);
      acc(n, 1, n.grad);
    });
  }
  // row-broadcast: [R,C] + [C]
  require(a.rank() == 2 && b.rank() == 1 && a.dim(1) == b.dim(0),
          "add: shape mismatch (", a.rank(), "-D vs ", b.rank(), "-D)");
  const int64_t rows = a.dim(0), cols = a.dim(1);
  std::vector<double> out(a.values());
  const auto& bv = b.values();
  for (int64_t i = 0; i < rows; ++i) {
    double* row = out.data() + i * cols;
    for (int64_t j = 0; j < cols; ++j) row[j] += bv[static_cast<size_t>(j)];
  }
  return make_op("add", a.shape(), std::move(out), {a, b},
                 [rows, cols](TensorNode& n) {
                   acc(n, 0, n.grad);
                   TensorNode* bn = n.inputs[1].get();
                   if (!bn->requires_grad) return;
                   bn->ensure_grad();
                   for (int64_t i = 0; i < rows; ++i) {
                     const double* g = n.grad.data() + i * cols;
                     for (int64_t j = 0; j < cols; ++j) bn->grad[static_cast<size_t>(j)] += g[j];
                   }
                 });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(same_shape(a, b), "sub: shape mismatch");
  std::vector<double> out(a.values());
  const auto& bv = b.values();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return make_op("sub", a.shape(), std::move(out), {a, b}, [](TensorNode& n) {
    acc(n, 0, n.grad);
    TensorNode* bn = n.inputs[1].get();
    if (!bn->requires_grad) return;
    bn->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) bn->grad[i] -= n.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(same_shape(a, b), "mul: shape mismatch");
  std::vector<double> out(a.values());
  const auto& bv = b.values();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return make_op("mul", a.shape(), std::move(out), {a, b}, [](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    TensorNode* bn = n.inputs[1].get();
    if (an->requires_grad) {
      an->ensure_grad();
      for (size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i] * bn->values[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (size_t i = 0; i < n.grad.size(); ++i) bn->grad[i] += n.grad[i] * an->values[i];
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.values());
  for (auto& v : out) v *= c;
  return make_op("scale", a.shape(), std::move(out), {a}, [c](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += c * n.grad[i];
  });
}

Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.values());
  for (auto& v : out) v += c;
  return make_op("add_scalar", a.shape(), std::move(out), {a},
                 [](TensorNode& n) { acc(n, 0, n.grad); });
}

Tensor exp(const Tensor& a) {
  std::vector<double> out(a.values());
  for (auto& v : out) v = std::exp(v);
  return make_op("exp", a.shape(), std::move(out), {a}, [](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i] * n.values[i];
  });
}

Tensor log(const Tensor& a) {
  std::vector<double> out(a.values());
  for (auto& v : out) {
    require(v > 0.0, "op 'log': operand must be strictly positive, got ", v);
    v = std::log(v);
  }
  return make_op("log", a.shape(), std::move(out), {a}, [](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i] / an->values[i];
  });
}

Tensor power(const Tensor& a, double p) {
  std::vector<double> out(a.values());
  const bool integral_p = p == std::floor(p);
  for (auto& v : out) {
    require(v >= 0.0 || integral_p, "op 'power': negative base ", v,
            " with non-integer exponent ", p);
    require(v != 0.0 || p >= 0.0, "op 'power': zero base with negative exponent ", p);
    v = std::pow(v, p);
  }
  return make_op("power", a.shape(), std::move(out), {a}, [p](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) {
      const double x = an->values[i];
      // subgradient 0 at the x = 0, p < 1 kink
      const double d = (x == 0.0 && p < 1.0) ? 0.0 : p * std::pow(x, p - 1.0);
      an->grad[i] += n.grad[i] * d;
    }
  });
}

Tensor xlogx(const Tensor& a) {
  std::vector<double> out(a.values());
  for (auto& v : out) {
    require(v >= 0.0, "op 'xlogx': operand must be non-negative, got ", v);
    v = v > 0.0 ? v * std::log(v) : 0.0;
  }
  return make_op("xlogx", a.shape(), std::move(out), {a}, [](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) {
      const double x = an->values[i];
      an->grad[i] += x > 0.0 ? n.grad[i] * (std::log(x) + 1.0) : 0.0;
    }
  });
}

namespace {
double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x * kInvSqrt2)); }
double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
}  // namespace

Tensor gelu(const Tensor& a) {
  std::vector<double> out(a.values());
  for (auto& v : out) v = v * normal_cdf(v);
  return make_op("gelu", a.shape(), std::move(out), {a}, [](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < n.grad.size(); ++i) {
      const double x = an->values[i];
      an->grad[i] += n.grad[i] * (normal_cdf(x) + x * normal_pdf(x));
    }
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_2d(a, "matmul");
  check_2d(b, "matmul");
  const int64_t R = a.dim(0), K = a.dim(1), C = b.dim(1);
  require(b.dim(0) == K, "matmul: inner extents differ (", K, " vs ", b.dim(0), ")");
  std::vector<double> out(static_cast<size_t>(R * C), 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (int64_t i = 0; i < R; ++i) {
    double* orow = out.data() + i * C;
    const double* arow = av + i * K;
    for (int64_t k = 0; k < K; ++k) {
      const double aik = arow[k];
      const double* brow = bv + k * C;
      for (int64_t j = 0; j < C; ++j) orow[j] += aik * brow[j];
    }
  }
  return make_op("matmul", {R, C}, std::move(out), {a, b}, [R, K, C](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    TensorNode* bn = n.inputs[1].get();
    const double* g = n.grad.data();
    if (an->requires_grad) {
      an->ensure_grad();
      const double* bv = bn->values.data();
      for (int64_t i = 0; i < R; ++i) {
        double* garow = an->grad.data() + i * K;
        const double* grow = g + i * C;
        for (int64_t k = 0; k < K; ++k) {
          const double* brow = bv + k * C;
          double s = 0.0;
          for (int64_t j = 0; j < C; ++j) s += grow[j] * brow[j];
          garow[k] += s;
        }
      }
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      const double* av = an->values.data();
      for (int64_t i = 0; i < R; ++i) {
        const double* arow = av + i * K;
        const double* grow = g + i * C;
        for (int64_t k = 0; k < K; ++k) {
          const double aik = arow[k];
          double* gbrow = bn->grad.data() + k * C;
          for (int64_t j = 0; j < C; ++j) gbrow[j] += aik * grow[j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  check_2d(a, "transpose");
  const int64_t R = a.dim(0), C = a.dim(1);
  std::vector<double> out(static_cast<size_t>(R * C));
  const double* av = a.values().data();
  for (int64_t i = 0; i < R; ++i)
    for (int64_t j = 0; j < C; ++j) out[static_cast<size_t>(j * R + i)] = av[i * C + j];
  return make_op("transpose", {C, R}, std::move(out), {a}, [R, C](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (int64_t j = 0; j < C; ++j)
      for (int64_t i = 0; i < R; ++i)
        an->grad[static_cast<size_t>(i * C + j)] += n.grad[static_cast<size_t>(j * R + i)];
  });
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (const double v : a.values()) s += v;
  return make_op("sum_all", {1}, {s}, {a}, [](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (auto& g : an->grad) g += n.grad[0];
  });
}

Tensor mean_all(const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.size());
  double s = 0.0;
  for (const double v : a.values()) s += v;
  return make_op("mean_all", {1}, {s * inv}, {a}, [inv](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (auto& g : an->grad) g += n.grad[0] * inv;
  });
}

namespace {

Tensor sum_axis_impl(const Tensor& a, int axis, bool mean, const char* name) {
  check_2d(a, name);
  require(axis == 0 || axis == 1, name, ": axis must be 0 or 1, got ", axis);
  const int64_t R = a.dim(0), C = a.dim(1);
  const double inv = mean ? 1.0 / static_cast<double>(axis == 0 ? R : C) : 1.0;
  const double* av = a.values().data();
  std::vector<double> out;
  if (axis == 0) {
    out.assign(static_cast<size_t>(C), 0.0);
    for (int64_t i = 0; i < R; ++i)
      for (int64_t j = 0; j < C; ++j) out[static_cast<size_t>(j)] += av[i * C + j];
  } else {
    out.assign(static_cast<size_t>(R), 0.0);
    for (int64_t i = 0; i < R; ++i)
      for (int64_t j = 0; j < C; ++j) out[static_cast<size_t>(i)] += av[i * C + j];
  }
  for (auto& v : out) v *= inv;
  const int64_t len = axis == 0 ? C : R;
  return make_op(name, {len}, std::move(out), {a}, [axis, R, C, inv](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (int64_t i = 0; i < R; ++i)
      for (int64_t j = 0; j < C; ++j)
        an->grad[static_cast<size_t>(i * C + j)] +=
            inv * n.grad[static_cast<size_t>(axis == 0 ? j : i)];
  });
}

}  // namespace

Tensor sum_axis(const Tensor& a, int axis) { return sum_axis_impl(a, axis, false, "sum_axis"); }
Tensor mean_axis(const Tensor& a, int axis) { return sum_axis_impl(a, axis, true, "mean_axis"); }

Tensor row_softmax(const Tensor& a) {
  check_2d(a, "row_softmax");
  const int64_t R = a.dim(0), C = a.dim(1);
  std::vector<double> out(a.values());
  for (int64_t i = 0; i < R; ++i) {
    double* row = out.data() + i * C;
    double m = row[0];
    for (int64_t j = 1; j < C; ++j) m = std::max(m, row[j]);
    double z = 0.0;
    for (int64_t j = 0; j < C; ++j) {
      row[j] = std::exp(row[j] - m);
      z += row[j];
    }
    const double inv = 1.0 / z;
    for (int64_t j = 0; j < C; ++j) row[j] *= inv;
  }
  return make_op("row_softmax", a.shape(), std::move(out), {a}, [R, C](TensorNode& n) {
    TensorNode* an = n.inputs[0].get();
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (int64_t i = 0; i < R; ++i) {
      const double* y = n.values.data() + i * C;
      const double* g = n.grad.data() + i * C;
      double dot = 0.0;
      for (int64_t j = 0; j < C; ++j) dot += y[j] * g[j];
      double* ga = an->grad.data() + i * C;
      for (int64_t j = 0; j < C; ++j) ga[j] += y[j] * (g[j] - dot);
    }
  });
}

Tensor log_softmax_rows(const Tensor& a) {
  check_2d(a, "log_softmax_rows");
  const int64_t R = a.dim(0), C = a.dim(1);
  std::vector<double> out(a.values());
  for (int64_t i = 0; i < R; ++i) {
    double* row = out.data() + i * C;
    double m = row[0];
    for (int64_t j = 1; j < C; ++j) m = std::max(m, row[j]);
    double z = 0.0;
    for (int64_t j = 0; j < C; ++j) z += std::exp(row[j] - m);
    const double lse = m + std::log(z);
    for (int64_t j = 0; j < C; ++j) row[j] -= lse;
  }
  return make_op("log_softmax_rows", a.shape(), std::move(out), {a},
                 [R, C](TensorNode& n) {
                   TensorNode* an = n.inputs[0].get();
                   if (!an->requires_grad) return;
                   an->ensure_grad();
                   for (int64_t i = 0; i < R; ++i) {
                     const double* y = n.values.data() + i * C;
                     const double* g = n.grad.data() + i * C;
                     double gsum = 0.0;
                     for (int64_t j = 0; j < C; ++j) gsum += g[j];
                     double* ga = an->grad.data() + i * C;
                     for (int64_t j = 0; j < C; ++j) ga[j] += g[j] - std::exp(y[j]) * gsum;
                   }
                 });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps) {
  check_2d(x, "layer_norm");
  const int64_t R = x.dim(0), C = x.dim(1);
  require(gamma.rank() == 1 && gamma.dim(0) == C, "layer_norm: gamma length ",
          gamma.size(), " does not match row width ", C);
  require(beta.rank() == 1 && beta.dim(0) == C, "layer_norm: beta length ",
          beta.size(), " does not match row width ", C);
  require(eps >= 0.0, "layer_norm: eps must be non-negative");

  std::vector<double> out(static_cast<size_t>(R * C));
  std::vector<double> xhat(static_cast<size_t>(R * C));
  std::vector<double> inv_std(static_cast<size_t>(R));
  const double* xv = x.values().data();
  const double* gv = gamma.values().data();
  const double* bv = beta.values().data();
  for (int64_t i = 0; i < R; ++i) {
    const double* row = xv + i * C;
    double mean = 0.0;
    for (int64_t j = 0; j < C; ++j) mean += row[j];
    mean /= static_cast<double>(C);
    double var = 0.0;
    for (int64_t j = 0; j < C; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(C);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<size_t>(i)] = inv;
    for (int64_t j = 0; j < C; ++j) {
      const double xh = (row[j] - mean) * inv;
      xhat[static_cast<size_t>(i * C + j)] = xh;
      out[static_cast<size_t>(i * C + j)] = gv[j] * xh + bv[j];
    }
  }
  return make_op(
      "layer_norm", x.shape(), std::move(out), {x, gamma, beta},
      [R, C, xhat = std::move(xhat), inv_std = std::move(inv_std)](TensorNode& n) {
        TensorNode* xn = n.inputs[0].get();
        TensorNode* gn = n.inputs[1].get();
        TensorNode* bn = n.inputs[2].get();
        const double* g = n.grad.data();
        if (gn->requires_grad) {
          gn->ensure_grad();
          for (int64_t i = 0; i < R; ++i)
            for (int64_t j = 0; j < C; ++j)
              gn->grad[static_cast<size_t>(j)] +=
                  g[i * C + j] * xhat[static_cast<size_t>(i * C + j)];
        }
        if (bn->requires_grad) {
          bn->ensure_grad();
          for (int64_t i = 0; i < R; ++i)
            for (int64_t j = 0; j < C; ++j) bn->grad[static_cast<size_t>(j)] += g[i * C + j];
        }
        if (xn->requires_grad) {
          xn->ensure_grad();
          const double* gv = gn->values.data();
          const double invC = 1.0 / static_cast<double>(C);
          for (int64_t i = 0; i < R; ++i) {
            const double* grow = g + i * C;
            const double* xh = xhat.data() + i * C;
            double mean_dy = 0.0, mean_dy_xh = 0.0;
            for (int64_t j = 0; j < C; ++j) {
              const double dy = grow[j] * gv[j];
              mean_dy += dy;
              mean_dy_xh += dy * xh[j];
            }
            mean_dy *= invC;
            mean_dy_xh *= invC;
            const double inv = inv_std[static_cast<size_t>(i)];
            double* gx = xn->grad.data() + i * C;
            for (int64_t j = 0; j < C; ++j) {
              const double dy = grow[j] * gv[j];
              gx[j] += inv * (dy - mean_dy - xh[j] * mean_dy_xh);
            }
          }
        }
      });
}

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& bias, int64_t stride) {
  check_2d(x, "conv1d");
  require(w.rank() == 3, "conv1d: weight must be [C_out, C_in, k], got rank ",
          w.rank());
  const int64_t Cin = x.dim(0), L = x.dim(1);
  const int64_t Cout = w.dim(0), k = w.dim(2);
  require(w.dim(1) == Cin, "conv1d: weight C_in ", w.dim(1),
          " does not match input channels ", Cin);
  require(bias.rank() == 1 && bias.dim(0) == Cout, "conv1d: bias length ",
          bias.size(), " does not match C_out ", Cout);
  require(stride >= 1, "conv1d: stride must be >= 1, got ", stride);
  require(L >= k, "conv1d: input length ", L, " shorter than kernel ", k);
  const int64_t Lout = (L - k) / stride + 1;

  std::vector<double> out(static_cast<size_t>(Cout * Lout));
  const double* xv = x.values().data();
  const double* wv = w.values().data();
  const double* bv = bias.values().data();
  for (int64_t co = 0; co < Cout; ++co) {
    double* orow = out.data() + co * Lout;
    for (int64_t t = 0; t < Lout; ++t) orow[t] = bv[co];
    for (int64_t ci = 0; ci < Cin; ++ci) {
      const double* wrow = wv + (co * Cin + ci) * k;
      const double* xrow = xv + ci * L;
      for (int64_t kk = 0; kk < k; ++kk) {
        const double wk = wrow[kk];
        const double* xs = xrow + kk;
        for (int64_t t = 0; t < Lout; ++t) orow[t] += wk * xs[t * stride];
      }
    }
  }
  return make_op(
      "conv1d", {Cout, Lout}, std::move(out), {x, w, bias},
      [Cin, L, Cout, k, Lout, stride](TensorNode& n) {
        TensorNode* xn = n.inputs[0].get();
        TensorNode* wn = n.inputs[1].get();
        TensorNode* bn = n.inputs[2].get();
        const double* g = n.grad.data();
        if (bn->requires_grad) {
          bn->ensure_grad();
          for (int64_t co = 0; co < Cout; ++co) {
            const double* grow = g + co * Lout;
            double s = 0.0;
            for (int64_t t = 0; t < Lout; ++t) s += grow[t];
            bn->grad[static_cast<size_t>(co)] += s;
          }
        }
        if (wn->requires_grad) {
          wn->ensure_grad();
          const double* xv = xn->values.data();
          for (int64_t co = 0; co < Cout; ++co) {
            const double* grow = g + co * Lout;
            for (int64_t ci = 0; ci < Cin; ++ci) {
              const double* xrow = xv + ci * L;
              double* gw = wn->grad.data() + (co * Cin + ci) * k;
              for (int64_t kk = 0; kk < k; ++kk) {
                const double* xs = xrow + kk;
                double s = 0.0;
                for (int64_t t = 0; t < Lout; ++t) s += grow[t] * xs[t * stride];
                gw[kk] += s;
              }
            }
          }
        }
        if (xn->requires_grad) {
          xn->ensure_grad();
          const double* wv = wn->values.data();
          for (int64_t co = 0; co < Cout; ++co) {
            const double* grow = g + co * Lout;
            for (int64_t ci = 0; ci < Cin; ++ci) {
              const double* wrow = wv + (co * Cin + ci) * k;
              double* gx = xn->grad.data() + ci * L;
              for (int64_t kk = 0; kk < k; ++kk) {
                const double wk = wrow[kk];
                double* gxs = gx + kk;
                for (int64_t t = 0; t < Lout; ++t) gxs[t * stride] += wk * grow[t];
              }
            }
          }
        }
      });
}

Tensor reshape(const Tensor& a, std::vector<int64_t> shape) {
  require(numel(shape) == a.size(), "reshape: element count mismatch (", a.size(),
          " vs ", numel(shape), ")");
  std::vector<double> out(a.values());
  return make_op("reshape", std::move(shape), std::move(out), {a},
                 [](TensorNode& n) { acc(n, 0, n.grad); });
}

Tensor slice_rows(const Tensor& a, int64_t start, int64_t len) {
  check_2d(a, "slice_rows");
  const int64_t R = a.dim(0), C = a.dim(1);
  require(start >= 0 && len >= 1 && start + len <= R, "slice_rows: range [", start,
          ", ", start + len, ") out of bounds for ", R, " rows");
  std::vector<double> out(a.values().begin() + start * C,
                          a.values().begin() + (start + len) * C);
  return make_op("slice_rows", {len, C}, std::move(out), {a},
                 [start, C](TensorNode& n) {
                   TensorNode* an = n.inputs[0].get();
                   if (!an->requires_grad) return;
                   an->ensure_grad();
                   for (size_t i = 0; i < n.grad.size(); ++i)
                     an->grad[static_cast<size_t>(start * C) + i] += n.grad[i];
                 });
}

Tensor slice_cols(const Tensor& a, int64_t start, int64_t len) {
  check_2d(a, "slice_cols");
  const int64_t R = a.dim(0), C = a.dim(1);
  require(start >= 0 && len >= 1 && start + len <= C, "slice_cols: range [", start,
          ", ", start + len, ") out of bounds for ", C, " cols");
  std::vector<double> out(static_cast<size_t>(R * len));
  const double* av = a.values().data();
  for (int64_t i = 0; i < R; ++i)
    for (int64_t j = 0; j < len; ++j)
      out[static_cast<size_t>(i * len + j)] = av[i * C + start + j];
  return make_op("slice_cols", {R, len}, std::move(out), {a},
                 [R, C, start, len](TensorNode& n) {
                   TensorNode* an = n.inputs[0].get();
                   if (!an->requires_grad) return;
                   an->ensure_grad();
                   for (int64_t i = 0; i < R; ++i)
                     for (int64_t j = 0; j < len; ++j)
                       an->grad[static_cast<size_t>(i * C + start + j)] +=
                           n.grad[static_cast<size_t>(i * len + j)];
                 });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_rows: no parts");
  const int64_t C = parts[0].rank() == 2 ? parts[0].dim(1) : -1;
  require(C > 0, "concat_rows: parts must be 2-D");
  int64_t R = 0;
  for (const auto& p : parts) {
    require(p.rank() == 2 && p.dim(1) == C, "concat_rows: column widths differ");
    R += p.dim(0);
  }
  std::vector<double> out;
  out.reserve(static_cast<size_t>(R * C));
  for (const auto& p : parts)
    out.insert(out.end(), p.values().begin(), p.values().end());
  std::vector<int64_t> part_rows;
  for (const auto& p : parts) part_rows.push_back(p.dim(0));
  return make_op("concat_rows", {R, C}, std::move(out), parts,
                 [part_rows, C](TensorNode& n) {
                   int64_t row0 = 0;
                   for (size_t pi = 0; pi < n.inputs.size(); ++pi) {
                     TensorNode* in = n.inputs[pi].get();
                     const int64_t rows = part_rows[pi];
                     if (in->requires_grad) {
                       in->ensure_grad();
                       for (int64_t i = 0; i < rows * C; ++i)
                         in->grad[static_cast<size_t>(i)] +=
                             n.grad[static_cast<size_t>(row0 * C + i)];
                     }
                     row0 += rows;
                   }
                 });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_cols: no parts");
  require(parts[0].rank() == 2, "concat_cols: parts must be 2-D");
  const int64_t R = parts[0].dim(0);
  int64_t C = 0;
  for (const auto& p : parts) {
    require(p.rank() == 2 && p.dim(0) == R, "concat_cols: row counts differ");
    C += p.dim(1);
  }
  std::vector<double> out(static_cast<size_t>(R * C));
  int64_t col0 = 0;
  for (const auto& p : parts) {
    const int64_t pc = p.dim(1);
    const double* pv = p.values().data();
    for (int64_t i = 0; i < R; ++i)
      for (int64_t j = 0; j < pc; ++j)
        out[static_cast<size_t>(i * C + col0 + j)] = pv[i * pc + j];
    col0 += pc;
  }
  std::vector<int64_t> part_cols;
  for (const auto& p : parts) part_cols.push_back(p.dim(1));
  return make_op("concat_cols", {R, C}, std::move(out), parts,
                 [part_cols, R, C](TensorNode& n) {
                   int64_t col0 = 0;
                   for (size_t pi = 0; pi < n.inputs.size(); ++pi) {
                     TensorNode* in = n.inputs[pi].get();
                     const int64_t pc = part_cols[pi];
                     if (in->requires_grad) {
                       in->ensure_grad();
                       for (int64_t i = 0; i < R; ++i)
                         for (int64_t j = 0; j < pc; ++j)
                           in->grad[static_cast<size_t>(i * pc + j)] +=
                               n.grad[static_cast<size_t>(i * C + col0 + j)];
                     }
                     col0 += pc;
                   }
                 });
}

Tensor embedding_rows(const Tensor& table, const std::vector<int64_t>& indices) {
  check_2d(table, "embedding_rows");
  const int64_t N = table.dim(0), D = table.dim(1);
  std::vector<double> out;
  out.reserve(indices.size() * static_cast<size_t>(D));
  for (const int64_t idx : indices) {
    require(idx >= 0 && idx < N, "embedding_rows: index ", idx,
            " out of range for table with ", N, " rows");
    const double* row = table.values().data() + idx * D;
    out.insert(out.end(), row, row + D);
  }
  const int64_t T = static_cast<int64_t>(indices.size());
  require(T >= 1, "embedding_rows: empty index list");
  return make_op("embedding_rows", {T, D}, std::move(out), {table},
                 [indices, D](TensorNode& n) {
                   TensorNode* tn = n.inputs[0].get();
                   if (!tn->requires_grad) return;
                   tn->ensure_grad();
                   for (size_t t = 0; t < indices.size(); ++t) {
                     double* dst = tn->grad.data() + indices[t] * D;
                     const double* src = n.grad.data() + static_cast<int64_t>(t) * D;
                     for (int64_t j = 0; j < D; ++j) dst[j] += src[j];
                   }
                 });
}

Tensor mask_rows(const Tensor& x, const std::vector<int64_t>& rows, const Tensor& emb) {
  check_2d(x, "mask_rows");
  const int64_t T = x.dim(0), D = x.dim(1);
  require(emb.rank() == 1 && emb.dim(0) == D, "mask_rows: embedding length ",
          emb.size(), " does not match row width ", D);
  std::vector<double> out(x.values());
  const double* ev = emb.values().data();
  for (const int64_t r : rows) {
    require(r >= 0 && r < T, "mask_rows: row ", r, " out of range for ", T, " rows");
    double* dst = out.data() + r * D;
    for (int64_t j = 0; j < D; ++j) dst[j] = ev[j];
  }
  return make_op("mask_rows", x.shape(), std::move(out), {x, emb},
                 [rows, T, D](TensorNode& n) {
                   TensorNode* xn = n.inputs[0].get();
                   TensorNode* en = n.inputs[1].get();
                   std::vector<char> is_masked(static_cast<size_t>(T), 0);
                   for (const int64_t r : rows) is_masked[static_cast<size_t>(r)] = 1;
                   if (xn->requires_grad) {
                     xn->ensure_grad();
                     for (int64_t t = 0; t < T; ++t) {
                       if (is_masked[static_cast<size_t>(t)]) continue;
                       for (int64_t j = 0; j < D; ++j)
                         xn->grad[static_cast<size_t>(t * D + j)] +=
                             n.grad[static_cast<size_t>(t * D + j)];
                     }
                   }
                   if (en->requires_grad) {
                     en->ensure_grad();
                     for (int64_t t = 0; t < T; ++t) {
                       if (!is_masked[static_cast<size_t>(t)]) continue;
                       for (int64_t j = 0; j < D; ++j)
                         en->grad[static_cast<size_t>(j)] +=
                             n.grad[static_cast<size_t>(t * D + j)];
                     }
                   }
                 });
}

Tensor detach(const Tensor& a) {
  return Tensor::from_values(a.shape(), a.values(), false);
}

std::vector<int64_t> argmax_rows(const Tensor& a) {
  require(a.rank() == 2, "argmax_rows: expected a 2-D tensor");
  const int64_t R = a.dim(0), C = a.dim(1);
  std::vector<int64_t> out(static_cast<size_t>(R));
  const double* av = a.values().data();
  for (int64_t i = 0; i < R; ++i) {
    const double* row = av + i * C;
    int64_t best = 0;
    for (int64_t j = 1; j < C; ++j)
      if (row[j] > row[best]) best = j;
    out[static_cast<size_t>(i)] = best;
  }
  return out;
}

double reduce_max(const Tensor& a) {
  require(a.size() > 0, "reduce_max: empty tensor");
  double m = a.values()[0];
  for (const double v : a.values()) m = std::max(m, v);
  return m;
}

}  // namespace voxc::ops
