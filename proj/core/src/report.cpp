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

#include "voxc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "voxc/ctc.hpp"
#include "voxc/error.hpp"
#include "voxc/ops.hpp"
#include "voxc/wer.hpp"

namespace voxc {

EvalReport eval_report(const Model& model, const std::string& manifest_path,
                       const NGramLM* lm, const DecodeConfig& decode_cfg,
                       double bucket_width_s) {
  require(bucket_width_s > 0.0, "eval_report: bucket width must be positive");
  const std::vector<UtteranceRecord> records = load_manifest(manifest_path);
  const CharVocab vocab = model.vocab();

  EvalReport report;
  report.total_utterances = static_cast<int64_t>(records.size());

  struct BucketAccum {
    int64_t count = 0;
    int64_t errors = 0;
    int64_t ref_words = 0;
  };
  std::map<int64_t, BucketAccum> buckets;

  for (const auto& rec : records) {
    try {
      const Waveform raw = load_wav(resolve_audio_path(manifest_path, rec));
      const NormalizedWave norm = normalize_wave(raw);
      require(!norm.degenerate, "zero-variance audio");
      const Tensor context = model.contextualize(model.encode(norm.wave));
      const Tensor logp = ops::log_softmax_rows(model.ctc_head_logits(context));
      const DecodeResult decoded = beam_decode(logp, lm, decode_cfg, vocab);

      const WerResult w = wer(rec.transcript, decoded.text);
      report.decodes.push_back({rec.id, rec.transcript, decoded.text});
      report.total_errors += w.errors();
      report.total_reference_words += w.reference_words;

      const int64_t bucket =
          static_cast<int64_t>(std::floor(rec.duration_s / bucket_width_s));
      auto& acc = buckets[bucket];
      ++acc.count;
      acc.errors += w.errors();
      acc.ref_words += w.reference_words;
    } catch (const Error& e) {
      fail("eval_report: utterance '", rec.id, "': ", e.what());
    }
  }

  for (const auto& [idx, acc] : buckets) {
    BucketRow row;
    row.start_s = static_cast<double>(idx) * bucket_width_s;
    row.end_s = static_cast<double>(idx + 1) * bucket_width_s;
    row.count = acc.count;
    row.wer = static_cast<double>(acc.errors) /
              static_cast<double>(std::max<int64_t>(1, acc.ref_words));
    report.buckets.push_back(row);
  }
  if (!records.empty()) {
    report.has_aggregate = true;
    report.aggregate_wer =
        static_cast<double>(report.total_errors) /
        static_cast<double>(std::max<int64_t>(1, report.total_reference_words));
  }
  return report;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "bucket_start_s,bucket_end_s,count,wer\n";
  char buf[128];
  for (const auto& row : report.buckets) {
    std::snprintf(buf, sizeof(buf), "%g,%g,%lld,%.6f\n", row.start_s, row.end_s,
                  static_cast<long long>(row.count), row.wer);
    out << buf;
  }
  return out.str();
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  require(out.good(), "write_report_csv: cannot open '", path, "'");
  out << report_csv(report);
  require(out.good(), "write_report_csv: write failed for '", path, "'");
}

std::string decode_dump_tsv(const EvalReport& report) {
  std::ostringstream out;
  for (const auto& d : report.decodes)
    out << d.id << '\t' << d.reference << '\t' << d.hypothesis << '\n';
  return out.str();
}

void write_decode_dump(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  require(out.good(), "write_decode_dump: cannot open '", path, "'");
  out << decode_dump_tsv(report);
  require(out.good(), "write_decode_dump: write failed for '", path, "'");
}

}  // namespace voxc
