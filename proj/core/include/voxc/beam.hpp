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

#ifndef VOXC_BEAM_HPP_
#define VOXC_BEAM_HPP_

#include <string>

#include "voxc/ctc.hpp"
#include "voxc/ngram.hpp"
#include "voxc/tensor.hpp"

namespace voxc {

struct DecodeConfig {
  int beam_width = 16;
  double lm_weight = 1.0;
  double word_bonus = 0.5;  // additive log-domain bonus per completed word
};

struct DecodeResult {
  std::string text;
  double score = 0.0;  // acoustic log probability plus LM terms
};

// CTC prefix beam search with prefix merging (separate blank / non-blank path
// scores). When a space completes a word, lm_weight * ln P(word | history) +
// word_bonus is added to the hypothesis score. Ties between equal scores
// break lexicographically. An undefined logp tensor decodes as the empty
// string (T = 0). `lm` may be null for acoustic-only decoding.
DecodeResult beam_decode(const Tensor& logp, const NGramLM* lm,
                         const DecodeConfig& cfg, const CharVocab& vocab);

}  // namespace voxc

#endif  // VOXC_BEAM_HPP_
