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

#include "voxc/speaker.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "voxc/error.hpp"

namespace voxc {

using nlohmann::json;

UtteranceEmbedding speaker_embedding(const Model& model, const Waveform& normalized) {
  return utterance_embedding(model.contextualize(model.encode(normalized)));
}

ProfileStore enroll(const Model& model, const std::string& manifest_path,
                    const std::string& checkpoint_fingerprint) {
  const std::vector<UtteranceRecord> records = load_manifest(manifest_path);
  require(!records.empty(), "enroll: manifest '", manifest_path, "' has no rows");

  const int64_t d = model.config().context.d_model;
  std::map<std::string, std::vector<double>> sums;
  std::map<std::string, int64_t> counts;
  for (const auto& rec : records) {
    const Waveform raw = load_wav(resolve_audio_path(manifest_path, rec));
    const NormalizedWave norm = normalize_wave(raw);
    if (norm.degenerate) {
      std::cerr << "warning: utterance '" << rec.id
                << "' has zero-variance audio; skipped for enrollment\n";
      continue;
    }
    const UtteranceEmbedding emb = speaker_embedding(model, norm.wave);
    if (emb.degenerate) {
      std::cerr << "warning: utterance '" << rec.id
                << "' produced a degenerate embedding; skipped\n";
      continue;
    }
    auto& sum = sums[rec.speaker_id];
    if (sum.empty()) sum.assign(static_cast<size_t>(d), 0.0);
    for (size_t j = 0; j < sum.size(); ++j) sum[j] += emb.vec[j];
    ++counts[rec.speaker_id];
  }

  ProfileStore store;
  store.fingerprint = checkpoint_fingerprint;
  for (auto& [speaker, sum] : sums) {
    double norm2 = 0.0;
    for (const double x : sum) norm2 += x * x;
    require(norm2 >= 1e-24, "enroll: every embedding for speaker '", speaker,
            "' is degenerate");
    const double inv = 1.0 / std::sqrt(norm2);
    SpeakerProfile profile;
    profile.speaker_id = speaker;
    profile.n_enrolled = counts[speaker];
    profile.centroid.resize(sum.size());
    for (size_t j = 0; j < sum.size(); ++j) profile.centroid[j] = sum[j] * inv;
    store.profiles[speaker] = std::move(profile);
  }
  require(!store.profiles.empty(), "enroll: no usable utterances in '", manifest_path,
          "'");
  return store;
}

IdentifyResult identify(const Model& model, const ProfileStore& store,
                        const Waveform& query, double threshold) {
  require(!store.profiles.empty(), "identify: empty profile store");
  const UtteranceEmbedding emb = speaker_embedding(model, query);
  require(!emb.degenerate, "identify: query produced a degenerate embedding");

  IdentifyResult out;
  double best = -2.0, second = -2.0;
  for (const auto& [speaker, profile] : store.profiles) {
    require(profile.centroid.size() == emb.vec.size(),
            "identify: centroid dimension ", profile.centroid.size(),
            " does not match embedding dimension ", emb.vec.size());
    double cos = 0.0;
    for (size_t j = 0; j < emb.vec.size(); ++j) cos += emb.vec[j] * profile.centroid[j];
    if (cos > best) {
      second = best;
      best = cos;
      out.speaker_id = speaker;
    } else if (cos > second) {
      second = cos;
    }
  }
  out.similarity = best;
  out.margin = store.profiles.size() >= 2 ? best - second : best - (-1.0);
  if (best < threshold) out.speaker_id = "unknown";
  return out;
}

void save_profiles(const std::string& path, const ProfileStore& store) {
  json profiles = json::object();
  for (const auto& [speaker, p] : store.profiles) {
    profiles[speaker] = {{"centroid", p.centroid}, {"n_enrolled", p.n_enrolled}};
  }
  const json doc = {{"fingerprint", store.fingerprint}, {"profiles", profiles}};
  std::ofstream out(path);
  require(out.good(), "save_profiles: cannot open '", path, "'");
  out << doc.dump(2) << "\n";
  require(out.good(), "save_profiles: write failed for '", path, "'");
}

ProfileStore load_profiles(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_profiles: cannot open '", path, "'");
  ProfileStore store;
  try {
    const json doc = json::parse(in);
    store.fingerprint = doc.at("fingerprint").get<std::string>();
    for (const auto& [speaker, p] : doc.at("profiles").items()) {
      SpeakerProfile profile;
      profile.speaker_id = speaker;
      profile.centroid = p.at("centroid").get<std::vector<double>>();
      profile.n_enrolled = p.at("n_enrolled").get<int64_t>();
      require(profile.n_enrolled >= 1, "load_profiles: speaker '", speaker,
              "': n_enrolled must be >= 1");
      store.profiles[speaker] = std::move(profile);
    }
  } catch (const json::exception& e) {
    fail("load_profiles: '", path, "': ", e.what());
  }
  return store;
}

}  // namespace voxc
