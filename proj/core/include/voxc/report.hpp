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

#ifndef VOXC_REPORT_HPP_
#define VOXC_REPORT_HPP_

#include <string>
#include <vector>

#include "voxc/beam.hpp"
#include "voxc/model.hpp"
#include "voxc/ngram.hpp"

namespace voxc {

struct BucketRow {
  double start_s = 0.0;
  double end_s = 0.0;
  int64_t count = 0;
  double wer = 0.0;  // bucket errors / max(1, bucket reference words)
};

struct DecodedUtterance {
  std::string id;
  std::string reference;
  std::string hypothesis;
};

struct EvalReport {
  std::vector<BucketRow> buckets;  // ascending, non-empty buckets only
  std::vector<DecodedUtterance> decodes;
  int64_t total_utterances = 0;
  int64_t total_errors = 0;
  int64_t total_reference_words = 0;
  bool has_aggregate = false;  // false on an empty manifest
  double aggregate_wer = 0.0;  // total errors / total reference words
};

// Beam-decodes every manifest utterance, scores WER, and aggregates into
// duration buckets of `bucket_width_s` seconds starting at 0. `lm` may be
// null for acoustic-only decoding.
EvalReport eval_report(const Model& model, const std::string& manifest_path,
                       const NGramLM* lm, const DecodeConfig& decode_cfg,
                       double bucket_width_s);

// CSV with header bucket_start_s,bucket_end_s,count,wer.
std::string report_csv(const EvalReport& report);
void write_report_csv(const std::string& path, const EvalReport& report);

// TSV dump, one line per utterance: id, reference, hypothesis.
std::string decode_dump_tsv(const EvalReport& report);
void write_decode_dump(const std::string& path, const EvalReport& report);

}  // namespace voxc

#endif  // VOXC_REPORT_HPP_
