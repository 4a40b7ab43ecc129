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

#ifndef VOXC_WER_HPP_
#define VOXC_WER_HPP_

#include <string>
#include <vector>

namespace voxc {

struct WerResult {
  double rate = 0.0;
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t reference_words = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
};

std::vector<std::string> split_words(const std::string& text);

// Word-level minimum edit distance. rate = (S+D+I) / max(1, reference words);
// ties in the alignment resolve substitution-first, so results are
// deterministic.
WerResult wer(const std::string& reference, const std::string& hypothesis);

}  // namespace voxc

#endif  // VOXC_WER_HPP_
