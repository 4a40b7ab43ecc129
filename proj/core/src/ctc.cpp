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

#include "voxc/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "voxc/audio.hpp"
#include "voxc/error.hpp"
#include "voxc/ops.hpp"

namespace voxc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double lse3(double a, double b, double c) { return lse2(lse2(a, b), c); }

}  // namespace

CharVocab::CharVocab(std::string chars) : chars_(std::move(chars)) {
  require(!chars_.empty(), "CharVocab: empty character set");
  for (size_t i = 0; i < chars_.size(); ++i) {
    for (size_t j = i + 1; j < chars_.size(); ++j) {
      require(chars_[i] != chars_[j], "CharVocab: duplicate character '",
              std::string(1, chars_[i]), "'");
    }
  }
}

CharVocab CharVocab::standard() { return CharVocab(std::string(kTranscriptAlphabet)); }

bool CharVocab::contains(char c) const {
  return chars_.find(c) != std::string::npos;
}

int64_t CharVocab::index_of(char c) const {
  const size_t pos = chars_.find(c);
  require(pos != std::string::npos, "CharVocab: character '", std::string(1, c),
          "' not in vocabulary");
  return static_cast<int64_t>(pos) + 1;
}

char CharVocab::char_at(int64_t index) const {
  require(index >= 1 && index <= n_chars(), "CharVocab: index ", index,
          " out of range [1, ", n_chars(), "]");
  return chars_[static_cast<size_t>(index - 1)];
}

int64_t ctc_min_frames(const std::string& target) {
  int64_t repeats = 0;
  for (size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++repeats;
  return static_cast<int64_t>(target.size()) + repeats;
}

void validate_log_probs(const Tensor& logp, double tol) {
  require(logp.rank() == 2, "log-probabilities must be 2-D, got rank ", logp.rank());
  const int64_t T = logp.dim(0), S = logp.dim(1);
  const double* v = logp.values().data();
  for (int64_t t = 0; t < T; ++t) {
    const double* row = v + t * S;
    double m = row[0];
    for (int64_t j = 1; j < S; ++j) m = std::max(m, row[j]);
    double z = 0.0;
    for (int64_t j = 0; j < S; ++j) z += std::exp(row[j] - m);
    const double lse = m + std::log(z);
    require(std::abs(lse) <= tol, "log-probability row ", t,
            " does not normalize: log-sum-exp = ", lse);
  }
}

CtcLoss ctc_loss(const Tensor& logp, const std::string& target,
                 const CharVocab& vocab) {
  require(logp.rank() == 2, "ctc_loss: logp must be 2-D");
  const int64_t T = logp.dim(0);
  const int64_t S = logp.dim(1);
  require(S == vocab.size_with_blank(), "ctc_loss: logp width ", S,
          " does not match vocab+blank ", vocab.size_with_blank());

  // extended label sequence: blank, y1, blank, y2, ..., blank
  std::vector<int64_t> ext;
  ext.push_back(0);
  for (const char c : target) {
    ext.push_back(vocab.index_of(c));
    ext.push_back(0);
  }
  const int64_t E = static_cast<int64_t>(ext.size());

  CtcLoss result;
  if (T < ctc_min_frames(target)) {
    result.feasible = false;
    result.value = std::numeric_limits<double>::infinity();
    return result;
  }

  const double* lp = logp.values().data();
  auto emit = [&](int64_t t, int64_t s) { return lp[t * S + ext[static_cast<size_t>(s)]]; };
  auto can_skip = [&](int64_t s) {
    // diagonal skip into state s allowed when its label is a fresh non-blank
    return s >= 2 && ext[static_cast<size_t>(s)] != 0 &&
           ext[static_cast<size_t>(s)] != ext[static_cast<size_t>(s - 2)];
  };

  std::vector<double> alpha(static_cast<size_t>(T * E), kNegInf);
  alpha[0] = emit(0, 0);
  if (E > 1) alpha[1] = emit(0, 1);
  for (int64_t t = 1; t < T; ++t) {
    const double* prev = alpha.data() + (t - 1) * E;
    double* cur = alpha.data() + t * E;
    for (int64_t s = 0; s < E; ++s) {
      double acc = prev[s];
      if (s >= 1) acc = lse2(acc, prev[s - 1]);
      if (can_skip(s)) acc = lse2(acc, prev[s - 2]);
      if (acc != kNegInf) cur[s] = acc + emit(t, s);
    }
  }
  const double* last = alpha.data() + (T - 1) * E;
  const double log_p = E >= 2 ? lse2(last[E - 1], last[E - 2]) : last[E - 1];
  require(log_p != kNegInf,
          "ctc_loss: no feasible alignment despite length check (target '", target,
          "', T=", T, ")");

  result.feasible = true;
  result.value = -log_p;

  auto node = std::make_shared<TensorNode>();
  node->shape = {1};
  node->values = {result.value};
  node->requires_grad = logp.requires_grad();
  if (node->requires_grad) {
    node->op = "ctc_loss";
    node->inputs = {logp.node()};
    // beta: suffix path mass excluding the emission at t
    std::vector<double> beta(static_cast<size_t>(T * E), kNegInf);
    beta[static_cast<size_t>((T - 1) * E + (E - 1))] = 0.0;
    if (E >= 2) beta[static_cast<size_t>((T - 1) * E + (E - 2))] = 0.0;
    for (int64_t t = T - 2; t >= 0; --t) {
      const double* next = beta.data() + (t + 1) * E;
      double* cur = beta.data() + t * E;
      for (int64_t s = 0; s < E; ++s) {
        double acc = next[s] == kNegInf ? kNegInf : next[s] + emit(t + 1, s);
        if (s + 1 < E && next[s + 1] != kNegInf)
          acc = lse2(acc, next[s + 1] + emit(t + 1, s + 1));
        if (s + 2 < E && can_skip(s + 2) && next[s + 2] != kNegInf)
          acc = lse2(acc, next[s + 2] + emit(t + 1, s + 2));
        cur[s] = acc;
      }
    }
    node->backward = [T, E, S, ext, alpha = std::move(alpha), beta = std::move(beta),
                      log_p](TensorNode& n) {
      TensorNode* in = n.inputs[0].get();
      if (!in->requires_grad) return;
      in->ensure_grad();
      const double g = n.grad[0];
      for (int64_t t = 0; t < T; ++t) {
        // gather occupancy per label at frame t
        std::vector<double> by_label(static_cast<size_t>(S), kNegInf);
        const double* arow = alpha.data() + t * E;
        const double* brow = beta.data() + t * E;
        for (int64_t s = 0; s < E; ++s) {
          if (arow[s] == kNegInf || brow[s] == kNegInf) continue;
          double& slot = by_label[static_cast<size_t>(ext[static_cast<size_t>(s)])];
          slot = lse2(slot, arow[s] + brow[s]);
        }
        for (int64_t k = 0; k < S; ++k) {
          if (by_label[static_cast<size_t>(k)] == kNegInf) continue;
          in->grad[static_cast<size_t>(t * S + k)] -=
              g * std::exp(by_label[static_cast<size_t>(k)] - log_p);
        }
      }
    };
  }
  result.loss = Tensor(std::move(node));
  return result;
}

std::string ctc_greedy(const Tensor& logp, const CharVocab& vocab) {
  require(logp.rank() == 2, "ctc_greedy: logp must be 2-D");
  require(logp.dim(1) == vocab.size_with_blank(), "ctc_greedy: logp width ",
          logp.dim(1), " does not match vocab+blank ", vocab.size_with_blank());
  const std::vector<int64_t> best = ops::argmax_rows(logp);
  std::string out;
  int64_t prev = 0;
  for (const int64_t idx : best) {
    if (idx != 0 && idx != prev) out.push_back(vocab.char_at(idx));
    prev = idx;
  }
  return out;
}

namespace {

std::string collapse_path(const std::vector<int64_t>& path, const CharVocab& vocab) {
  std::string out;
  int64_t prev = 0;
  for (const int64_t idx : path) {
    if (idx != 0 && idx != prev) out.push_back(vocab.char_at(idx));
    prev = idx;
  }
  return out;
}

}  // namespace

double ctc_oracle(const Tensor& probs, const std::string& target,
                  const CharVocab& vocab) {
  require(probs.rank() == 2, "ctc_oracle: probs must be 2-D");
  const int64_t T = probs.dim(0), S = probs.dim(1);
  require(T <= 8, "ctc_oracle: T=", T, " exceeds the enumeration limit 8");
  require(vocab.n_chars() <= 3, "ctc_oracle: vocab size ", vocab.n_chars(),
          " exceeds the enumeration limit 3");
  require(S == vocab.size_with_blank(), "ctc_oracle: probs width mismatch");

  const double* pv = probs.values().data();
  std::vector<int64_t> path(static_cast<size_t>(T), 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    for (int64_t t = 0; t < T; ++t) p *= pv[t * S + path[static_cast<size_t>(t)]];
    if (collapse_path(path, vocab) == target) total += p;
    // next path in base-S counting order
    int64_t pos = T - 1;
    while (pos >= 0 && path[static_cast<size_t>(pos)] == S - 1) {
      path[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++path[static_cast<size_t>(pos)];
  }
  if (total <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(total);
}

}  // namespace voxc
