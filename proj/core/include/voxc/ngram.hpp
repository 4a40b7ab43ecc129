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

#ifndef VOXC_NGRAM_HPP_
#define VOXC_NGRAM_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace voxc {

// Backoff n-gram language model over words (default order 4). Scoring uses
// maximum likelihood at the highest order with counts, multiplies the backoff
// factor per order dropped, and bottoms out in an add-one unigram over the
// vocabulary plus <unk>. Out-of-vocabulary words map to <unk>, so every
// score is finite.
class NGramLM {
 public:
  static constexpr const char* kUnk = "<unk>";

  // Counts all orders 1..n over the whitespace-tokenized corpus.
  static NGramLM train(const std::string& corpus, int n);

  int order() const { return n_; }
  double backoff_factor() const { return beta_; }
  int64_t total_tokens() const { return total_tokens_; }
  // Sorted vocabulary including <unk>.
  const std::vector<std::string>& vocab() const { return vocab_; }

  // ln P(word | history); history may be any length, only the last order-1
  // words are used. No implicit sentence boundaries.
  double cond_logprob(const std::vector<std::string>& history,
                      const std::string& word) const;

  // Sum of per-word conditional log probabilities; empty sequence scores 0.
  double logprob(const std::vector<std::string>& words) const;

  // Binary table file: magic NGLM, version byte, order, backoff factor,
  // sorted vocab block, then one sorted count block per order.
  void save(const std::string& path) const;
  static NGramLM load(const std::string& path);

 private:
  NGramLM() = default;
  int32_t word_id(const std::string& w) const;
  double cond_prob_ids(const std::vector<int32_t>& history, int32_t word) const;

  int n_ = 0;
  double beta_ = 0.4;
  int64_t total_tokens_ = 0;
  std::vector<std::string> vocab_;              // sorted, includes <unk>
  std::map<std::string, int32_t> word_ids_;
  // counts_[k-1]: occurrences of each k-gram, keyed by word-id sequence
  std::vector<std::map<std::vector<int32_t>, uint64_t>> counts_;
};

}  // namespace voxc

#endif  // VOXC_NGRAM_HPP_
