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

#include "voxc/wer.hpp"

#include <algorithm>

namespace voxc {

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (const char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) {
        words.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

WerResult wer(const std::string& reference, const std::string& hypothesis) {
  const std::vector<std::string> ref = split_words(reference);
  const std::vector<std::string> hyp = split_words(hypothesis);
  const size_t n = ref.size(), m = hyp.size();

  // dist[i][j]: edit distance between ref[0..i) and hyp[0..j)
  std::vector<std::vector<int64_t>> dist(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) dist[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) dist[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = dist[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int64_t del = dist[i - 1][j] + 1;
      const int64_t ins = dist[i][j - 1] + 1;
      dist[i][j] = std::min({sub, del, ins});
    }
  }

  WerResult r;
  r.reference_words = static_cast<int64_t>(n);
  // backtrack, preferring match/substitution, then deletion, then insertion
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        dist[i][j] == dist[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++r.substitutions;
      --i;
      --j;
    } else if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
      ++r.deletions;
      --i;
    } else {
      ++r.insertions;
      --j;
    }
  }
  r.rate = static_cast<double>(r.errors()) /
           static_cast<double>(std::max<int64_t>(1, r.reference_words));
  return r;
}

}  // namespace voxc
