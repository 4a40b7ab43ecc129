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

#include "voxc/audio.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "voxc/error.hpp"
#include "voxc/rng.hpp"

namespace voxc {

namespace {

namespace fs = std::filesystem;

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | b[1] << 8);
}

void write_u32(std::ostream& out, uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff),
                     static_cast<char>(v >> 16 & 0xff), static_cast<char>(v >> 24 & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff)};
  out.write(b, 2);
}

constexpr uint16_t kFormatPcm = 1;

}  // namespace

Waveform load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_wav: cannot open '", path, "'");

  char tag[4];
  in.read(tag, 4);
  require(in.good() && std::memcmp(tag, "RIFF", 4) == 0, "load_wav: '", path,
          "': missing RIFF header");
  read_u32(in);  // container size, unused
  in.read(tag, 4);
  require(in.good() && std::memcmp(tag, "WAVE", 4) == 0, "load_wav: '", path,
          "': not a WAVE container");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  Waveform w;

  while (in.read(tag, 4)) {
    const uint32_t chunk_size = read_u32(in);
    require(in.good(), "load_wav: '", path, "': truncated chunk header");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      require(chunk_size >= 16, "load_wav: '", path, "': fmt chunk too small");
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      in.ignore(chunk_size - 16);
      require(format == kFormatPcm, "load_wav: '", path, "': audio_format=", format,
              ", expected PCM(1)");
      require(channels == 1, "load_wav: '", path, "': channels=", channels,
              ", expected mono");
      require(bits == 16, "load_wav: '", path, "': bits_per_sample=", bits,
              ", expected 16");
      require(rate > 0, "load_wav: '", path, "': sample_rate=0");
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      require(have_fmt, "load_wav: '", path, "': data chunk before fmt chunk");
      const size_t n = chunk_size / 2;
      std::vector<char> raw(chunk_size);
      in.read(raw.data(), chunk_size);
      require(in.gcount() == static_cast<std::streamsize>(chunk_size), "load_wav: '",
              path, "': truncated data chunk (want ", chunk_size, " bytes, got ",
              in.gcount(), ")");
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const int16_t s = static_cast<int16_t>(
            static_cast<unsigned char>(raw[2 * i]) |
            static_cast<unsigned char>(raw[2 * i + 1]) << 8);
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      w.sample_rate = static_cast<int>(rate);
      require(!w.samples.empty(), "load_wav: '", path, "': empty data chunk");
      return w;
    } else {
      // skip unknown chunk, padded to even size
      in.ignore(chunk_size + (chunk_size & 1));
    }
  }
  fail("load_wav: '", path, "': no data chunk found");
}

void write_wav(const std::string& path, const Waveform& w) {
  require(w.sample_rate > 0, "write_wav: sample_rate must be positive");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_wav: cannot open '", path, "' for writing");

  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, kFormatPcm);
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(w.sample_rate));
  write_u32(out, static_cast<uint32_t>(w.sample_rate) * 2);
  write_u16(out, 2);   // block align
  write_u16(out, 16);  // bits per sample
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (const double x : w.samples) {
    long long v = std::llround(x * 32768.0);
    if (v > 32767) v = 32767;
    if (v < -32768) v = -32768;
    write_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  require(out.good(), "write_wav: write failed for '", path, "'");
}

NormalizedWave normalize_wave(const Waveform& w) {
  require(!w.samples.empty(), "normalize_wave: empty input");
  const size_t n = w.samples.size();
  double mean = 0.0;
  for (const double x : w.samples) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double x : w.samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);  // population variance

  NormalizedWave out;
  out.wave.sample_rate = w.sample_rate;
  out.wave.samples.resize(n);
  if (var < 1e-20) {
    out.degenerate = true;
    // already all zeros
    return out;
  }
  const double inv_std = 1.0 / std::sqrt(var);
  for (size_t i = 0; i < n; ++i) out.wave.samples[i] = (w.samples[i] - mean) * inv_std;
  return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
    const size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

constexpr const char* kManifestHeader = "id\taudio_path\ttranscript\tspeaker_id\tduration";

}  // namespace

std::vector<UtteranceRecord> load_manifest(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_manifest: cannot open '", path, "'");

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "load_manifest: '", path,
          "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kManifestHeader, "load_manifest: '", path,
          "': line 1: bad header, expected '", kManifestHeader, "'");

  std::vector<UtteranceRecord> records;
  std::set<std::string> seen_ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    require(fields.size() == 5, "load_manifest: '", path, "': line ", line_no,
            ": expected 5 fields, got ", fields.size());
    UtteranceRecord rec;
    rec.id = fields[0];
    rec.audio_path = fields[1];
    rec.transcript = fields[2];
    rec.speaker_id = fields[3];
    require(!rec.id.empty(), "load_manifest: '", path, "': line ", line_no,
            ": empty id");
    require(!rec.audio_path.empty(), "load_manifest: '", path, "': line ", line_no,
            ": empty audio_path");
    require(!rec.speaker_id.empty(), "load_manifest: '", path, "': line ", line_no,
            ": empty speaker_id");
    require(seen_ids.insert(rec.id).second, "load_manifest: '", path, "': line ",
            line_no, ": duplicate id '", rec.id, "'");
    for (const char c : rec.transcript) {
      require(is_transcript_char(c), "load_manifest: '", path, "': line ", line_no,
              ": transcript character '", std::string(1, c), "' not in vocabulary");
    }
    try {
      size_t used = 0;
      rec.duration_s = std::stod(fields[4], &used);
      require(used == fields[4].size(), "trailing characters");
    } catch (const std::exception&) {
      fail("load_manifest: '", path, "': line ", line_no, ": bad duration '",
           fields[4], "'");
    }
    require(rec.duration_s > 0.0, "load_manifest: '", path, "': line ", line_no,
            ": duration must be positive, got ", fields[4]);
    records.push_back(std::move(rec));
  }
  return records;
}

std::string resolve_audio_path(const std::string& manifest_path,
                               const UtteranceRecord& rec) {
  const fs::path p(rec.audio_path);
  if (p.is_absolute()) return rec.audio_path;
  return (fs::path(manifest_path).parent_path() / p).string();
}

namespace {

constexpr int kSynthRate = 16000;
constexpr double kNyquistMargin = 7600.0;

double speaker_base_freq(int speaker) { return 100.0 + 30.0 * speaker; }

// Two-sine mixture: the speaker's base tone plus a character tone at a fixed
// per-character multiple of the base. Spaces carry only a faint base tone.
void render_char(std::vector<double>& samples, size_t begin, size_t end,
                 double base_freq, size_t vocab_index, bool is_space) {
  const double ratio = 2.0 + 0.25 * static_cast<double>(vocab_index);
  for (size_t i = begin; i < end; ++i) {
    const double t = static_cast<double>(i) / kSynthRate;
    const double base = std::sin(6.283185307179586 * base_freq * t);
    if (is_space) {
      samples[i] = 0.08 * base;
    } else {
      const double tone = std::sin(6.283185307179586 * base_freq * ratio * t);
      samples[i] = 0.35 * base + 0.35 * tone;
    }
  }
}

std::string make_transcript(const SynthSpec& spec, Rng& rng) {
  std::string letters;
  for (const char c : spec.vocabulary) {
    if (c != ' ') letters.push_back(c);
  }
  require(!letters.empty(), "synth_corpus: vocabulary has no non-space characters");
  const bool has_space = spec.vocabulary.find(' ') != std::string::npos;

  // Duration is sampled later; keep transcripts short enough for the slowest
  // utterance: ~8 characters per second at the minimum duration.
  const int target = std::max(3, static_cast<int>(spec.min_duration_s * 8.0));
  std::string text;
  while (static_cast<int>(text.size()) < target) {
    const int word_len = 2 + static_cast<int>(rng.uniform_int(4));
    if (!text.empty() && has_space) text.push_back(' ');
    for (int i = 0; i < word_len; ++i) {
      text.push_back(letters[static_cast<size_t>(rng.uniform_int(
          static_cast<int64_t>(letters.size())))]);
    }
  }
  return text;
}

}  // namespace

std::string synth_corpus(const SynthSpec& spec, const std::string& out_dir) {
  require(spec.n_speakers >= 1, "synth_corpus: n_speakers must be >= 1, got ",
          spec.n_speakers);
  require(spec.utterances_per_speaker >= 1,
          "synth_corpus: utterances_per_speaker must be >= 1");
  require(spec.min_duration_s > 0.0 && spec.min_duration_s <= spec.max_duration_s,
          "synth_corpus: need 0 < min_duration <= max_duration");
  require(!spec.vocabulary.empty(), "synth_corpus: empty vocabulary");
  for (const char c : spec.vocabulary) {
    require(is_transcript_char(c), "synth_corpus: vocabulary character '",
            std::string(1, c), "' outside the transcript alphabet");
  }
  const double max_ratio = 2.0 + 0.25 * static_cast<double>(spec.vocabulary.size() - 1);
  require(speaker_base_freq(spec.n_speakers - 1) * max_ratio < kNyquistMargin,
          "synth_corpus: too many speakers (", spec.n_speakers,
          "): character tones would exceed the usable band");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(fs::is_directory(out_dir), "synth_corpus: cannot create directory '",
          out_dir, "'");

  const fs::path manifest_path = fs::path(out_dir) / "manifest.tsv";
  std::ofstream manifest(manifest_path);
  require(manifest.good(), "synth_corpus: cannot write '", manifest_path.string(), "'");
  manifest << kManifestHeader << "\n";

  Rng rng(spec.seed);
  for (int s = 0; s < spec.n_speakers; ++s) {
    char spk[16];
    std::snprintf(spk, sizeof(spk), "spk%02d", s);
    const double base = speaker_base_freq(s);
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      char utt[32];
      std::snprintf(utt, sizeof(utt), "%s-%03d", spk, u);
      const std::string transcript = make_transcript(spec, rng);
      const double dur = rng.uniform(spec.min_duration_s, spec.max_duration_s);
      const size_t n_samples = static_cast<size_t>(std::llround(dur * kSynthRate));

      Waveform w;
      w.sample_rate = kSynthRate;
      w.samples.assign(n_samples, 0.0);
      const size_t n_chars = transcript.size();
      const size_t slot = n_samples / n_chars;
      for (size_t c = 0; c < n_chars; ++c) {
        const size_t begin = c * slot;
        const size_t end = (c + 1 == n_chars) ? n_samples : (c + 1) * slot;
        const size_t vidx = spec.vocabulary.find(transcript[c]);
        render_char(w.samples, begin, end, base, vidx, transcript[c] == ' ');
      }

      const std::string wav_name = std::string(utt) + ".wav";
      write_wav((fs::path(out_dir) / wav_name).string(), w);

      char dur_text[32];
      std::snprintf(dur_text, sizeof(dur_text), "%.6f",
                    static_cast<double>(n_samples) / kSynthRate);
      manifest << utt << '\t' << wav_name << '\t' << transcript << '\t' << spk << '\t'
               << dur_text << "\n";
    }
  }
  manifest.close();
  require(manifest.good(), "synth_corpus: write failed for '",
          manifest_path.string(), "'");
  return manifest_path.string();
}

}  // namespace voxc
