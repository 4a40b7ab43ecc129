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

#include "voxc/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "voxc/error.hpp"
#include "voxc/wer.hpp"

namespace voxc {

NGramLM NGramLM::train(const std::string& corpus, int n) {
  require(n >= 1 && n <= 4, "train_ngram: order must be in [1, 4], got ", n);
  const std::vector<std::string> tokens = split_words(corpus);
  require(!tokens.empty(), "train_ngram: empty corpus");

  NGramLM lm;
  lm.n_ = n;
  lm.total_tokens_ = static_cast<int64_t>(tokens.size());

  std::map<std::string, int32_t> ids;
  ids[kUnk] = 0;
  for (const auto& t : tokens) ids[t] = 0;
  int32_t next_id = 0;
  for (auto& [word, id] : ids) {
    id = next_id++;
    lm.vocab_.push_back(word);
  }
  lm.word_ids_ = std::move(ids);

  lm.counts_.resize(static_cast<size_t>(n));
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::vector<int32_t> key;
    for (int k = 1; k <= n; ++k) {
      if (i + static_cast<size_t>(k) > tokens.size()) break;
      key.push_back(lm.word_ids_.at(tokens[i + static_cast<size_t>(k) - 1]));
      ++lm.counts_[static_cast<size_t>(k - 1)][key];
    }
  }
  return lm;
}

int32_t NGramLM::word_id(const std::string& w) const {
  const auto it = word_ids_.find(w);
  return it == word_ids_.end() ? word_ids_.at(kUnk) : it->second;
}

double NGramLM::cond_prob_ids(const std::vector<int32_t>& history,
                              int32_t word) const {
  if (!history.empty()) {
    std::vector<int32_t> key(history);
    key.push_back(word);
    const auto& table = counts_[history.size()];
    const auto hit = table.find(key);
    if (hit != table.end()) {
      const auto ctx = counts_[history.size() - 1].find(history);
      // an observed (h, w) implies h itself was observed
      return static_cast<double>(hit->second) / static_cast<double>(ctx->second);
    }
    return beta_ * cond_prob_ids(
                       std::vector<int32_t>(history.begin() + 1, history.end()), word);
  }
  const auto uni = counts_[0].find({word});
  const uint64_t c = uni == counts_[0].end() ? 0 : uni->second;
  return (static_cast<double>(c) + 1.0) /
         (static_cast<double>(total_tokens_) + static_cast<double>(vocab_.size()));
}

double NGramLM::cond_logprob(const std::vector<std::string>& history,
                             const std::string& word) const {
  const size_t max_hist = static_cast<size_t>(n_ - 1);
  const size_t use = std::min(history.size(), max_hist);
  std::vector<int32_t> hist_ids;
  hist_ids.reserve(use);
  for (size_t i = history.size() - use; i < history.size(); ++i)
    hist_ids.push_back(word_id(history[i]));
  return std::log(cond_prob_ids(hist_ids, word_id(word)));
}

double NGramLM::logprob(const std::vector<std::string>& words) const {
  double total = 0.0;
  std::vector<std::string> history;
  for (const auto& w : words) {
    total += cond_logprob(history, w);
    history.push_back(w);
  }
  return total;
}

namespace {

void write_u8(std::ostream& out, uint8_t v) {
  out.put(static_cast<char>(v));
}

void write_u32le(std::ostream& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>(v >> (8 * i) & 0xff));
}

void write_u64le(std::ostream& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>(v >> (8 * i) & 0xff));
}

void write_f64le(std::ostream& out, double v) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, 8);
  write_u64le(out, bits);
}

uint8_t read_u8(std::istream& in, const char* what) {
  const int c = in.get();
  require(c != EOF, "NGramLM: truncated file reading ", what);
  return static_cast<uint8_t>(c);
}

uint32_t read_u32le(std::istream& in, const char* what) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(read_u8(in, what)) << (8 * i);
  return v;
}

uint64_t read_u64le(std::istream& in, const char* what) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(read_u8(in, what)) << (8 * i);
  return v;
}

double read_f64le(std::istream& in, const char* what) {
  const uint64_t bits = read_u64le(in, what);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void NGramLM::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "NGramLM::save: cannot open '", path, "'");
  out.write("NGLM", 4);
  write_u8(out, 1);  // version
  write_u8(out, static_cast<uint8_t>(n_));
  write_f64le(out, beta_);
  write_u64le(out, static_cast<uint64_t>(total_tokens_));
  write_u32le(out, static_cast<uint32_t>(vocab_.size()));
  for (const auto& w : vocab_) {
    write_u32le(out, static_cast<uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  for (int k = 1; k <= n_; ++k) {
    const auto& table = counts_[static_cast<size_t>(k - 1)];
    write_u64le(out, table.size());
    for (const auto& [key, count] : table) {  // std::map: sorted keys
      for (const int32_t id : key) write_u32le(out, static_cast<uint32_t>(id));
      write_u64le(out, count);
    }
  }
  require(out.good(), "NGramLM::save: write failed for '", path, "'");
}

NGramLM NGramLM::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "NGramLM::load: cannot open '", path, "'");
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "NGLM", 4) == 0, "NGramLM::load: '", path,
          "': bad magic");
  const uint8_t version = read_u8(in, "version");
  require(version == 1, "NGramLM::load: '", path, "': unsupported version ",
          static_cast<int>(version));
  NGramLM lm;
  lm.n_ = read_u8(in, "order");
  require(lm.n_ >= 1 && lm.n_ <= 4, "NGramLM::load: '", path, "': bad order ", lm.n_);
  lm.beta_ = read_f64le(in, "backoff factor");
  lm.total_tokens_ = static_cast<int64_t>(read_u64le(in, "token count"));
  const uint32_t vocab_size = read_u32le(in, "vocab size");
  lm.vocab_.reserve(vocab_size);
  for (uint32_t i = 0; i < vocab_size; ++i) {
    const uint32_t len = read_u32le(in, "word length");
    std::string w(len, '\0');
    in.read(w.data(), len);
    require(in.good(), "NGramLM::load: '", path, "': truncated vocab block");
    lm.word_ids_[w] = static_cast<int32_t>(i);
    lm.vocab_.push_back(std::move(w));
  }
  require(lm.word_ids_.count(kUnk) == 1, "NGramLM::load: '", path,
          "': vocab lacks ", kUnk);
  lm.counts_.resize(static_cast<size_t>(lm.n_));
  for (int k = 1; k <= lm.n_; ++k) {
    const uint64_t entries = read_u64le(in, "table size");
    auto& table = lm.counts_[static_cast<size_t>(k - 1)];
    for (uint64_t e = 0; e < entries; ++e) {
      std::vector<int32_t> key(static_cast<size_t>(k));
      for (int i = 0; i < k; ++i) {
        const uint32_t id = read_u32le(in, "word id");
        require(id < vocab_size, "NGramLM::load: '", path, "': word id ", id,
                " out of range");
        key[static_cast<size_t>(i)] = static_cast<int32_t>(id);
      }
      table[std::move(key)] = read_u64le(in, "count");
    }
  }
  return lm;
}

}  // namespace voxc
