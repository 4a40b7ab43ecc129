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

#ifndef VOXC_CTC_HPP_
#define VOXC_CTC_HPP_

#include <string>

#include "voxc/tensor.hpp"

namespace voxc {

// Character inventory for CTC heads. Index 0 is the blank; transcript
// characters occupy indices 1..size(). The order is fixed and recorded in
// checkpoints.
class CharVocab {
 public:
  CharVocab() = default;
  explicit CharVocab(std::string chars);

  // 26 lowercase letters, space, apostrophe.
  static CharVocab standard();

  const std::string& chars() const { return chars_; }
  int64_t n_chars() const { return static_cast<int64_t>(chars_.size()); }
  int64_t size_with_blank() const { return n_chars() + 1; }
  bool contains(char c) const;
  int64_t index_of(char c) const;  // in [1, n_chars]; fails if absent
  char char_at(int64_t index) const;

 private:
  std::string chars_;
};

// Outcome of the CTC forward pass. Targets that no length-T path can produce
// are reported as infeasible (value +inf) instead of crashing; `loss` is a
// usable tape tensor only when feasible.
struct CtcLoss {
  bool feasible = false;
  double value = 0.0;
  Tensor loss;
};

// Negative log probability of `target` under the frame log-probabilities
// logp ([T, vocab+1], rows post log-softmax), summed over all collapsing
// alignments by the forward algorithm in log space. Differentiable w.r.t.
// logp via the forward-backward statistics.
CtcLoss ctc_loss(const Tensor& logp, const std::string& target,
                 const CharVocab& vocab);

// Best-path decode: per-frame argmax, collapse repeats, drop blanks.
std::string ctc_greedy(const Tensor& logp, const CharVocab& vocab);

// Test oracle: exhaustively enumerates all (vocab+1)^T paths of the
// probability table `probs` (not logs) and sums those collapsing to target.
// Returns the NLL; +inf when no path matches. Guard-railed to T <= 8 and
// vocab size <= 3.
double ctc_oracle(const Tensor& probs, const std::string& target,
                  const CharVocab& vocab);

// Smallest T that can emit `target` (accounts for doubled letters).
int64_t ctc_min_frames(const std::string& target);

// Checks the LogitSequence contract: every row's log-sum-exp is 0 within tol.
void validate_log_probs(const Tensor& logp, double tol = 1e-6);

}  // namespace voxc

#endif  // VOXC_CTC_HPP_
