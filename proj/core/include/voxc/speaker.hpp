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

#ifndef VOXC_SPEAKER_HPP_
#define VOXC_SPEAKER_HPP_

#include <map>
#include <string>
#include <vector>

#include "voxc/model.hpp"

namespace voxc {

struct SpeakerProfile {
  std::string speaker_id;
  std::vector<double> centroid;  // unit length
  int64_t n_enrolled = 0;
};

struct ProfileStore {
  std::map<std::string, SpeakerProfile> profiles;
  std::string fingerprint;  // hex fingerprint of the checkpoint file
};

// Context-embedding of one normalized waveform with masking disabled.
UtteranceEmbedding speaker_embedding(const Model& model, const Waveform& normalized);

// One profile per speaker in the manifest: the L2-normalized mean of that
// speaker's utterance embeddings. Utterances with degenerate embeddings are
// skipped; a speaker with none left is an error.
ProfileStore enroll(const Model& model, const std::string& manifest_path,
                    const std::string& checkpoint_fingerprint);

struct IdentifyResult {
  std::string speaker_id;  // "unknown" when below threshold
  double similarity = 0.0;
  double margin = 0.0;  // best minus second-best (vs -1 with one profile)
};

// Nearest centroid by cosine; rejects as "unknown" below the threshold.
IdentifyResult identify(const Model& model, const ProfileStore& store,
                        const Waveform& query, double threshold);

// JSON persistence (speaker_id, centroid, fingerprint); human-inspectable.
void save_profiles(const std::string& path, const ProfileStore& store);
ProfileStore load_profiles(const std::string& path);

}  // namespace voxc

#endif  // VOXC_SPEAKER_HPP_
