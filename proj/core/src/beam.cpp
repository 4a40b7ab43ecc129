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

#include "voxc/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "voxc/error.hpp"
#include "voxc/wer.hpp"

namespace voxc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct Hyp {
  double p_blank = kNegInf;     // log mass of paths ending in blank
  double p_nonblank = kNegInf;  // log mass of paths ending in the last char
  double lm_score = 0.0;        // accumulated LM + word-bonus terms

  double combined() const { return lse2(p_blank, p_nonblank) + lm_score; }
};

// LM + bonus increment when appending `c` to `prefix`. Non-space characters
// contribute nothing; a space closes the trailing word (if any).
double lm_delta(const std::string& prefix, char c, const NGramLM* lm,
                const DecodeConfig& cfg) {
  if (c != ' ' || lm == nullptr || cfg.lm_weight == 0.0) return 0.0;
  const size_t last_space = prefix.find_last_of(' ');
  const std::string word =
      last_space == std::string::npos ? prefix : prefix.substr(last_space + 1);
  if (word.empty()) return 0.0;
  std::vector<std::string> history = split_words(prefix);
  history.pop_back();  // the word being completed
  return cfg.lm_weight * lm->cond_logprob(history, word) + cfg.word_bonus;
}

}  // namespace

DecodeResult beam_decode(const Tensor& logp, const NGramLM* lm,
                         const DecodeConfig& cfg, const CharVocab& vocab) {
  require(cfg.beam_width >= 1, "beam_decode: beam_width must be >= 1, got ",
          cfg.beam_width);
  require(cfg.lm_weight >= 0.0, "beam_decode: lm_weight must be >= 0");
  if (!logp.defined()) return {"", 0.0};
  require(logp.rank() == 2, "beam_decode: logp must be 2-D");
  const int64_t T = logp.dim(0), S = logp.dim(1);
  require(S == vocab.size_with_blank(), "beam_decode: logp width ", S,
          " does not match vocab+blank ", vocab.size_with_blank());

  const double* lp = logp.values().data();
  std::map<std::string, Hyp> beam;
  beam[""] = Hyp{0.0, kNegInf, 0.0};

  for (int64_t t = 0; t < T; ++t) {
    std::map<std::string, Hyp> next;
    const double* frame = lp + t * S;
    for (const auto& [prefix, h] : beam) {
      const double p_total = lse2(h.p_blank, h.p_nonblank);

      // emit blank: prefix unchanged, ends-in-blank mass grows
      {
        Hyp& nh = next[prefix];
        nh.lm_score = h.lm_score;
        nh.p_blank = lse2(nh.p_blank, p_total + frame[0]);
      }

      for (int64_t ci = 1; ci < S; ++ci) {
        const char c = vocab.char_at(ci);
        const double pc = frame[ci];
        if (!prefix.empty() && prefix.back() == c) {
          // repeated char collapses onto the same prefix...
          {
            Hyp& nh = next[prefix];
            nh.lm_score = h.lm_score;
            nh.p_nonblank = lse2(nh.p_nonblank, h.p_nonblank + pc);
          }
          // ...unless a blank separated it, which starts a new copy
          if (h.p_blank != kNegInf) {
            const std::string grown = prefix + c;
            Hyp& nh = next[grown];
            nh.lm_score = h.lm_score + lm_delta(prefix, c, lm, cfg);
            nh.p_nonblank = lse2(nh.p_nonblank, h.p_blank + pc);
          }
        } else {
          const std::string grown = prefix + c;
          Hyp& nh = next[grown];
          nh.lm_score = h.lm_score + lm_delta(prefix, c, lm, cfg);
          nh.p_nonblank = lse2(nh.p_nonblank, p_total + pc);
        }
      }
    }

    if (static_cast<int>(next.size()) > cfg.beam_width) {
      // keep the top beam_width by combined score; ties lexicographic
      std::vector<std::pair<std::string, Hyp>> entries(next.begin(), next.end());
      std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        const double sa = a.second.combined(), sb = b.second.combined();
        if (sa != sb) return sa > sb;
        return a.first < b.first;
      });
      entries.resize(static_cast<size_t>(cfg.beam_width));
      next = std::map<std::string, Hyp>(entries.begin(), entries.end());
    }
    beam = std::move(next);
  }

  const std::string* best_text = nullptr;
  double best_score = kNegInf;
  for (const auto& [prefix, h] : beam) {  // sorted: first seen wins ties
    const double s = h.combined();
    if (best_text == nullptr || s > best_score) {
      best_text = &prefix;
      best_score = s;
    }
  }
  return {*best_text, best_score};
}

}  // namespace voxc
