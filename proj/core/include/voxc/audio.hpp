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

#ifndef VOXC_AUDIO_HPP_
#define VOXC_AUDIO_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace voxc {

// Characters a transcript may contain. Also the default synthesis vocabulary
// and the source of the standard CTC character set.
inline constexpr std::string_view kTranscriptAlphabet =
    "abcdefghijklmnopqrstuvwxyz '";

inline bool is_transcript_char(char c) {
  return kTranscriptAlphabet.find(c) != std::string_view::npos;
}

struct Waveform {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  int sample_rate = 0;          // Hz

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

struct NormalizedWave {
  Waveform wave;
  bool degenerate = false;  // set when the input had zero variance
};

struct UtteranceRecord {
  std::string id;
  std::string audio_path;  // as written in the manifest, possibly relative
  std::string transcript;
  std::string speaker_id;
  double duration_s = 0.0;
};

struct SynthSpec {
  int n_speakers = 1;
  int utterances_per_speaker = 1;
  double min_duration_s = 1.0;
  double max_duration_s = 1.0;
  std::string vocabulary{kTranscriptAlphabet};
  uint64_t seed = 0;
};

// Reads a RIFF/WAVE file. Only 16-bit PCM mono is accepted; anything else is
// rejected with a message naming the offending property.
Waveform load_wav(const std::string& path);

// Writes 16-bit PCM mono. Samples loaded by load_wav round-trip exactly.
void write_wav(const std::string& path, const Waveform& w);

// Shifts to zero mean and scales to unit population variance. Zero-variance
// input yields all zeros with the degenerate flag set instead of an error.
NormalizedWave normalize_wave(const Waveform& w);

// Parses a TSV manifest with header id/audio_path/transcript/speaker_id/duration.
std::vector<UtteranceRecord> load_manifest(const std::string& path);

// Resolves a record's audio path against the directory of its manifest.
std::string resolve_audio_path(const std::string& manifest_path,
                               const UtteranceRecord& rec);

// Generates a toy corpus of additive sine-mixture speakers, fully determined
// by spec.seed. Returns the path of the written manifest.
std::string synth_corpus(const SynthSpec& spec, const std::string& out_dir);

}  // namespace voxc

#endif  // VOXC_AUDIO_HPP_
