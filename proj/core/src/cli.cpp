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

#include "voxc/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "voxc/audio.hpp"
#include "voxc/beam.hpp"
#include "voxc/checkpoint.hpp"
#include "voxc/config.hpp"
#include "voxc/error.hpp"
#include "voxc/ngram.hpp"
#include "voxc/ops.hpp"
#include "voxc/report.hpp"
#include "voxc/speaker.hpp"
#include "voxc/trainer.hpp"

namespace voxc {

namespace {

struct CliState {
  std::string config_path;
  std::optional<uint64_t> seed_flag;

  // synth
  std::string out_dir;
  std::optional<int> n_speakers, utterances_per_speaker;
  std::optional<double> duration_min, duration_max;
  std::optional<std::string> vocabulary;

  // training
  std::string manifest, out_path, init_path, metrics_path;
  std::optional<int64_t> steps;
  bool freeze_encoder = false;

  // lm
  std::string corpus_path;
  std::optional<int> lm_order;

  // decode / eval
  std::string checkpoint_path, lm_path, dump_path;
  std::optional<int> beam_width;
  std::optional<double> lm_weight, word_bonus, bucket_width;

  // identify
  std::string profiles_path, wav_path;
  std::optional<double> threshold;
};

void require_arg(const std::string& value, const char* flag, const char* sub) {
  require(!value.empty(), sub, ": missing required ", flag);
}

PipelineConfig effective_config(const CliState& st) {
  PipelineConfig cfg =
      st.config_path.empty() ? PipelineConfig{} : load_config_file(st.config_path);
  if (const char* env = std::getenv("VOXC_SEED")) {
    try {
      size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      require(used == std::string(env).size(), "trailing characters");
      cfg.seed = static_cast<uint64_t>(v);
    } catch (const std::exception&) {
      fail("VOXC_SEED: cannot parse '", env, "' as an unsigned integer");
    }
  }
  if (st.seed_flag) cfg.seed = *st.seed_flag;
  return cfg;
}

DecodeConfig effective_decode(const CliState& st, const PipelineConfig& cfg) {
  DecodeConfig d = cfg.decode;
  if (st.beam_width) d.beam_width = *st.beam_width;
  if (st.lm_weight) d.lm_weight = *st.lm_weight;
  if (st.word_bonus) d.word_bonus = *st.word_bonus;
  return d;
}

int cmd_synth(const CliState& st) {
  require_arg(st.out_dir, "--out-dir", "synth");
  const PipelineConfig cfg = effective_config(st);
  SynthSpec spec;
  spec.seed = cfg.seed;
  spec.n_speakers = st.n_speakers.value_or(4);
  spec.utterances_per_speaker = st.utterances_per_speaker.value_or(10);
  spec.min_duration_s = st.duration_min.value_or(1.0);
  spec.max_duration_s = st.duration_max.value_or(2.0);
  if (st.vocabulary) spec.vocabulary = *st.vocabulary;
  const std::string manifest = synth_corpus(spec, st.out_dir);
  std::cout << manifest << "\n";
  return 0;
}

int cmd_pretrain(const CliState& st) {
  require_arg(st.manifest, "--manifest", "pretrain");
  require_arg(st.out_path, "--out", "pretrain");
  PipelineConfig cfg = effective_config(st);
  if (st.steps) cfg.pretrain.steps = *st.steps;
  const TrainResult result = pretrain_run(cfg, st.manifest, cfg.seed);
  save_checkpoint(st.out_path, result.checkpoint);
  if (!st.metrics_path.empty()) write_metrics_csv(st.metrics_path, result.metrics);
  std::cout << st.out_path << "\n";
  return 0;
}

int cmd_finetune(const CliState& st) {
  require_arg(st.manifest, "--manifest", "finetune");
  require_arg(st.init_path, "--init", "finetune");
  require_arg(st.out_path, "--out", "finetune");
  PipelineConfig cfg = effective_config(st);
  if (st.steps) cfg.finetune.steps = *st.steps;
  if (st.freeze_encoder) cfg.finetune.freeze_encoder = true;
  const Checkpoint pretrained = load_checkpoint(st.init_path);
  const TrainResult result = finetune_run(cfg, pretrained, st.manifest, cfg.seed);
  save_checkpoint(st.out_path, result.checkpoint);
  if (!st.metrics_path.empty()) write_metrics_csv(st.metrics_path, result.metrics);
  std::cout << st.out_path << "\n";
  return 0;
}

int cmd_lm_train(const CliState& st) {
  require_arg(st.out_path, "--out", "lm-train");
  require(!st.corpus_path.empty() || !st.manifest.empty(),
          "lm-train: missing required --corpus (or --manifest)");
  std::string text;
  if (!st.corpus_path.empty()) {
    std::ifstream in(st.corpus_path);
    require(in.good(), "lm-train: cannot open '", st.corpus_path, "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else {
    for (const auto& rec : load_manifest(st.manifest)) {
      text += rec.transcript;
      text += '\n';
    }
  }
  const NGramLM lm = NGramLM::train(text, st.lm_order.value_or(4));
  lm.save(st.out_path);
  std::cout << st.out_path << "\n";
  return 0;
}

int cmd_decode(const CliState& st) {
  require_arg(st.checkpoint_path, "--checkpoint", "decode");
  require_arg(st.manifest, "--manifest", "decode");
  const PipelineConfig cli_cfg = effective_config(st);
  const Checkpoint ckpt = load_checkpoint(st.checkpoint_path);
  const Model model = checkpoint_model(ckpt);
  const DecodeConfig dcfg = effective_decode(st, cli_cfg);

  std::optional<NGramLM> lm;
  if (!st.lm_path.empty()) lm = NGramLM::load(st.lm_path);

  const CharVocab vocab = model.vocab();
  for (const auto& rec : load_manifest(st.manifest)) {
    const Waveform raw = load_wav(resolve_audio_path(st.manifest, rec));
    const NormalizedWave norm = normalize_wave(raw);
    require(!norm.degenerate, "decode: utterance '", rec.id, "': zero-variance audio");
    const Tensor context = model.contextualize(model.encode(norm.wave));
    const Tensor logp = ops::log_softmax_rows(model.ctc_head_logits(context));
    const DecodeResult result =
        beam_decode(logp, lm ? &*lm : nullptr, dcfg, vocab);
    std::cout << rec.id << '\t' << result.text << "\n";
  }
  return 0;
}

int cmd_eval(const CliState& st) {
  require_arg(st.checkpoint_path, "--checkpoint", "eval");
  require_arg(st.manifest, "--manifest", "eval");
  require_arg(st.out_path, "--out", "eval");
  const PipelineConfig cli_cfg = effective_config(st);
  const Checkpoint ckpt = load_checkpoint(st.checkpoint_path);
  const Model model = checkpoint_model(ckpt);
  const DecodeConfig dcfg = effective_decode(st, cli_cfg);

  std::optional<NGramLM> lm;
  if (!st.lm_path.empty()) lm = NGramLM::load(st.lm_path);

  const double width = st.bucket_width.value_or(cli_cfg.report_bucket_width_s);
  const EvalReport report =
      eval_report(model, st.manifest, lm ? &*lm : nullptr, dcfg, width);
  write_report_csv(st.out_path, report);
  if (!st.dump_path.empty()) write_decode_dump(st.dump_path, report);

  std::cout << "utterances\t" << report.total_utterances << "\n";
  if (report.has_aggregate) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", report.aggregate_wer);
    std::cout << "aggregate_wer\t" << buf << "\n";
  } else {
    std::cout << "aggregate_wer\tn/a\n";
  }
  return 0;
}

int cmd_enroll(const CliState& st) {
  require_arg(st.checkpoint_path, "--checkpoint", "enroll");
  require_arg(st.manifest, "--manifest", "enroll");
  require_arg(st.out_path, "--out", "enroll");
  const Checkpoint ckpt = load_checkpoint(st.checkpoint_path);
  const Model model = checkpoint_model(ckpt);
  const std::string fp = fingerprint_hex(file_fingerprint(st.checkpoint_path));
  const ProfileStore store = enroll(model, st.manifest, fp);
  save_profiles(st.out_path, store);
  std::cout << "speakers\t" << store.profiles.size() << "\n";
  return 0;
}

int cmd_identify(const CliState& st) {
  require_arg(st.checkpoint_path, "--checkpoint", "identify");
  require_arg(st.profiles_path, "--profiles", "identify");
  require_arg(st.wav_path, "--wav", "identify");
  const PipelineConfig cli_cfg = effective_config(st);
  const Checkpoint ckpt = load_checkpoint(st.checkpoint_path);
  const Model model = checkpoint_model(ckpt);
  const ProfileStore store = load_profiles(st.profiles_path);

  const std::string fp = fingerprint_hex(file_fingerprint(st.checkpoint_path));
  require(fp == store.fingerprint, "identify: profile store was built for checkpoint ",
          store.fingerprint, " but '", st.checkpoint_path, "' has fingerprint ", fp);

  const Waveform raw = load_wav(st.wav_path);
  const NormalizedWave norm = normalize_wave(raw);
  require(!norm.degenerate, "identify: query audio has zero variance");
  const double threshold = st.threshold.value_or(cli_cfg.identify_threshold);
  const IdentifyResult result = identify(model, store, norm.wave, threshold);

  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f", result.speaker_id.c_str(),
                result.similarity, result.margin);
  std::cout << buf << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"desk-scale self-supervised speech recognition and speaker identification"};
  app.require_subcommand(1);
  CliState st;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", st.config_path, "JSON config file");
    sub->add_option("--seed", st.seed_flag, "override the config seed");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a deterministic toy corpus");
  add_common(synth);
  synth->add_option("--out-dir", st.out_dir, "output directory");
  synth->add_option("--n-speakers", st.n_speakers, "number of speakers (default 4)");
  synth->add_option("--utterances-per-speaker", st.utterances_per_speaker,
                    "utterances per speaker (default 10)");
  synth->add_option("--duration-min", st.duration_min, "minimum seconds (default 1.0)");
  synth->add_option("--duration-max", st.duration_max, "maximum seconds (default 2.0)");
  synth->add_option("--vocabulary", st.vocabulary, "character set for transcripts");

  CLI::App* pretrain = app.add_subcommand("pretrain", "self-supervised pretraining");
  add_common(pretrain);
  pretrain->add_option("--manifest", st.manifest, "training manifest TSV");
  pretrain->add_option("--out", st.out_path, "output checkpoint path");
  pretrain->add_option("--steps", st.steps, "override pretrain.steps");
  pretrain->add_option("--metrics", st.metrics_path, "write metrics CSV here");

  CLI::App* finetune = app.add_subcommand("finetune", "CTC fine-tuning");
  add_common(finetune);
  finetune->add_option("--manifest", st.manifest, "labeled manifest TSV");
  finetune->add_option("--init", st.init_path, "pretrained checkpoint");
  finetune->add_option("--out", st.out_path, "output checkpoint path");
  finetune->add_option("--steps", st.steps, "override finetune.steps");
  finetune->add_flag("--freeze-encoder", st.freeze_encoder,
                     "do not update encoder parameters");
  finetune->add_option("--metrics", st.metrics_path, "write metrics CSV here");

  CLI::App* lm_train = app.add_subcommand("lm-train", "train the n-gram word LM");
  add_common(lm_train);
  lm_train->add_option("--corpus", st.corpus_path, "plain-text training corpus");
  lm_train->add_option("--manifest", st.manifest,
                       "build the corpus from manifest transcripts");
  lm_train->add_option("--order", st.lm_order, "n-gram order (default 4)");
  lm_train->add_option("--out", st.out_path, "output LM path");

  CLI::App* decode = app.add_subcommand("decode", "beam-decode a manifest");
  add_common(decode);
  decode->add_option("--checkpoint", st.checkpoint_path, "fine-tuned checkpoint");
  decode->add_option("--manifest", st.manifest, "manifest TSV");
  decode->add_option("--lm", st.lm_path, "n-gram LM file");
  decode->add_option("--beam-width", st.beam_width, "beam width");
  decode->add_option("--lm-weight", st.lm_weight, "LM fusion weight");
  decode->add_option("--word-bonus", st.word_bonus, "per-word log bonus");

  CLI::App* eval = app.add_subcommand("eval", "decode, score WER, report buckets");
  add_common(eval);
  eval->add_option("--checkpoint", st.checkpoint_path, "fine-tuned checkpoint");
  eval->add_option("--manifest", st.manifest, "manifest TSV");
  eval->add_option("--lm", st.lm_path, "n-gram LM file");
  eval->add_option("--out", st.out_path, "bucket CSV output path");
  eval->add_option("--dump", st.dump_path, "decode dump TSV output path");
  eval->add_option("--bucket-width", st.bucket_width, "bucket width in seconds");
  eval->add_option("--beam-width", st.beam_width, "beam width");
  eval->add_option("--lm-weight", st.lm_weight, "LM fusion weight");
  eval->add_option("--word-bonus", st.word_bonus, "per-word log bonus");

  CLI::App* enroll_cmd = app.add_subcommand("enroll", "build speaker profiles");
  add_common(enroll_cmd);
  enroll_cmd->add_option("--checkpoint", st.checkpoint_path, "model checkpoint");
  enroll_cmd->add_option("--manifest", st.manifest, "enrollment manifest TSV");
  enroll_cmd->add_option("--out", st.out_path, "profile store JSON path");

  CLI::App* identify_cmd = app.add_subcommand("identify", "identify a speaker");
  add_common(identify_cmd);
  identify_cmd->add_option("--checkpoint", st.checkpoint_path, "model checkpoint");
  identify_cmd->add_option("--profiles", st.profiles_path, "profile store JSON");
  identify_cmd->add_option("--wav", st.wav_path, "query WAV file");
  identify_cmd->add_option("--threshold", st.threshold,
                           "rejection threshold (default 0.25)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help goes to stdout, exit 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (app.got_subcommand(synth)) return cmd_synth(st);
    if (app.got_subcommand(pretrain)) return cmd_pretrain(st);
    if (app.got_subcommand(finetune)) return cmd_finetune(st);
    if (app.got_subcommand(lm_train)) return cmd_lm_train(st);
    if (app.got_subcommand(decode)) return cmd_decode(st);
    if (app.got_subcommand(eval)) return cmd_eval(st);
    if (app.got_subcommand(enroll_cmd)) return cmd_enroll(st);
    if (app.got_subcommand(identify_cmd)) return cmd_identify(st);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand dispatched\n";
  return 2;
}

}  // namespace voxc
