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

#include "voxc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "voxc/error.hpp"

namespace voxc {

using nlohmann::json;

void PipelineConfig::validate() const {
  model.validate();
  contrastive.validate();
  pretrain_loss.validate();
  adam.validate();
  require(pretrain.steps >= 0, "config: pretrain.steps must be >= 0");
  require(pretrain.batch_size >= 1, "config: pretrain.batch_size must be >= 1");
  require(pretrain.peak_lr >= 0.0, "config: pretrain.peak_lr must be >= 0");
  require(finetune.steps >= 0, "config: finetune.steps must be >= 0");
  require(finetune.batch_size >= 1, "config: finetune.batch_size must be >= 1");
  require(finetune.head_peak_lr >= 0.0 && finetune.body_peak_lr >= 0.0,
          "config: finetune learning rates must be >= 0");
  TriStateSchedule probe;
  probe.total_updates = 1;
  probe.warmup_frac = schedule.warmup_frac;
  probe.constant_frac = schedule.constant_frac;
  probe.decay_frac = schedule.decay_frac;
  probe.validate();
  require(decode.beam_width >= 1, "config: decode.beam_width must be >= 1");
  require(decode.lm_weight >= 0.0, "config: decode.lm_weight must be >= 0");
  require(report_bucket_width_s > 0.0, "config: report.bucket_width_s must be > 0");
}

namespace {

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    require(ok, "config: unknown key '", key, "' in ", where);
  }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_encoder(const json& obj, EncoderConfig& cfg) {
  check_keys(obj, "encoder", {"layers"});
  if (!obj.contains("layers")) return;
  cfg.layers.clear();
  for (const auto& row : obj.at("layers")) {
    require(row.is_array() && row.size() == 3,
            "config: encoder.layers entries must be [channels, kernel, stride]");
    cfg.layers.push_back(
        {row[0].get<int64_t>(), row[1].get<int64_t>(), row[2].get<int64_t>()});
  }
}

}  // namespace

PipelineConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail("config: invalid JSON: ", e.what());
  }
  require(doc.is_object(), "config: top level must be a JSON object");
  check_keys(doc, "config",
             {"seed", "encoder", "quantizer", "context", "mask", "vocab",
              "contrastive", "pretrain", "finetune", "adam", "schedule", "decode",
              "identify", "report"});

  PipelineConfig cfg;
  try {
    maybe(doc, "seed", cfg.seed);
    if (doc.contains("encoder")) parse_encoder(doc.at("encoder"), cfg.model.encoder);
    if (doc.contains("quantizer")) {
      const auto& q = doc.at("quantizer");
      check_keys(q, "quantizer",
                 {"groups", "entries", "dim", "tau_start", "tau_floor", "tau_decay"});
      maybe(q, "groups", cfg.model.quantizer.groups);
      maybe(q, "entries", cfg.model.quantizer.entries);
      maybe(q, "dim", cfg.model.quantizer.dim);
      maybe(q, "tau_start", cfg.model.quantizer.tau_start);
      maybe(q, "tau_floor", cfg.model.quantizer.tau_floor);
      maybe(q, "tau_decay", cfg.model.quantizer.tau_decay);
    }
    if (doc.contains("context")) {
      const auto& c = doc.at("context");
      check_keys(c, "context",
                 {"d_model", "n_layers", "n_heads", "ffn_dim", "pos_kernel",
                  "pos_groups"});
      maybe(c, "d_model", cfg.model.context.d_model);
      maybe(c, "n_layers", cfg.model.context.n_layers);
      maybe(c, "n_heads", cfg.model.context.n_heads);
      maybe(c, "ffn_dim", cfg.model.context.ffn_dim);
      maybe(c, "pos_kernel", cfg.model.context.pos_kernel);
      maybe(c, "pos_groups", cfg.model.context.pos_groups);
    }
    if (doc.contains("mask")) {
      const auto& m = doc.at("mask");
      check_keys(m, "mask", {"p", "span"});
      maybe(m, "p", cfg.model.mask.p);
      maybe(m, "span", cfg.model.mask.span);
    }
    maybe(doc, "vocab", cfg.model.vocab_chars);
    if (doc.contains("contrastive")) {
      const auto& c = doc.at("contrastive");
      check_keys(c, "contrastive", {"distractors", "kappa"});
      maybe(c, "distractors", cfg.contrastive.distractors);
      maybe(c, "kappa", cfg.contrastive.kappa);
    }
    if (doc.contains("pretrain")) {
      const auto& p = doc.at("pretrain");
      check_keys(p, "pretrain", {"steps", "peak_lr", "batch_size", "alpha"});
      maybe(p, "steps", cfg.pretrain.steps);
      maybe(p, "peak_lr", cfg.pretrain.peak_lr);
      maybe(p, "batch_size", cfg.pretrain.batch_size);
      maybe(p, "alpha", cfg.pretrain_loss.alpha);
    }
    if (doc.contains("finetune")) {
      const auto& f = doc.at("finetune");
      check_keys(f, "finetune",
                 {"steps", "head_peak_lr", "body_peak_lr", "batch_size",
                  "freeze_encoder"});
      maybe(f, "steps", cfg.finetune.steps);
      maybe(f, "head_peak_lr", cfg.finetune.head_peak_lr);
      maybe(f, "body_peak_lr", cfg.finetune.body_peak_lr);
      maybe(f, "batch_size", cfg.finetune.batch_size);
      maybe(f, "freeze_encoder", cfg.finetune.freeze_encoder);
    }
    if (doc.contains("adam")) {
      const auto& a = doc.at("adam");
      check_keys(a, "adam", {"beta1", "beta2", "eps"});
      maybe(a, "beta1", cfg.adam.beta1);
      maybe(a, "beta2", cfg.adam.beta2);
      maybe(a, "eps", cfg.adam.eps);
    }
    if (doc.contains("schedule")) {
      const auto& s = doc.at("schedule");
      check_keys(s, "schedule", {"warmup_frac", "constant_frac", "decay_frac"});
      maybe(s, "warmup_frac", cfg.schedule.warmup_frac);
      maybe(s, "constant_frac", cfg.schedule.constant_frac);
      maybe(s, "decay_frac", cfg.schedule.decay_frac);
    }
    if (doc.contains("decode")) {
      const auto& d = doc.at("decode");
      check_keys(d, "decode", {"beam_width", "lm_weight", "word_bonus"});
      maybe(d, "beam_width", cfg.decode.beam_width);
      maybe(d, "lm_weight", cfg.decode.lm_weight);
      maybe(d, "word_bonus", cfg.decode.word_bonus);
    }
    if (doc.contains("identify")) {
      const auto& i = doc.at("identify");
      check_keys(i, "identify", {"threshold"});
      maybe(i, "threshold", cfg.identify_threshold);
    }
    if (doc.contains("report")) {
      const auto& r = doc.at("report");
      check_keys(r, "report", {"bucket_width_s"});
      maybe(r, "bucket_width_s", cfg.report_bucket_width_s);
    }
  } catch (const json::exception& e) {
    fail("config: ", e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open '", path, "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const PipelineConfig& cfg) {
  json enc_layers = json::array();
  for (const auto& l : cfg.model.encoder.layers)
    enc_layers.push_back({l.out_channels, l.kernel, l.stride});
  const json doc = {
      {"seed", cfg.seed},
      {"encoder", {{"layers", enc_layers}}},
      {"quantizer",
       {{"groups", cfg.model.quantizer.groups},
        {"entries", cfg.model.quantizer.entries},
        {"dim", cfg.model.quantizer.dim},
        {"tau_start", cfg.model.quantizer.tau_start},
        {"tau_floor", cfg.model.quantizer.tau_floor},
        {"tau_decay", cfg.model.quantizer.tau_decay}}},
      {"context",
       {{"d_model", cfg.model.context.d_model},
        {"n_layers", cfg.model.context.n_layers},
        {"n_heads", cfg.model.context.n_heads},
        {"ffn_dim", cfg.model.context.ffn_dim},
        {"pos_kernel", cfg.model.context.pos_kernel},
        {"pos_groups", cfg.model.context.pos_groups}}},
      {"mask", {{"p", cfg.model.mask.p}, {"span", cfg.model.mask.span}}},
      {"vocab", cfg.model.vocab_chars},
      {"contrastive",
       {{"distractors", cfg.contrastive.distractors}, {"kappa", cfg.contrastive.kappa}}},
      {"pretrain",
       {{"steps", cfg.pretrain.steps},
        {"peak_lr", cfg.pretrain.peak_lr},
        {"batch_size", cfg.pretrain.batch_size},
        {"alpha", cfg.pretrain_loss.alpha}}},
      {"finetune",
       {{"steps", cfg.finetune.steps},
        {"head_peak_lr", cfg.finetune.head_peak_lr},
        {"body_peak_lr", cfg.finetune.body_peak_lr},
        {"batch_size", cfg.finetune.batch_size},
        {"freeze_encoder", cfg.finetune.freeze_encoder}}},
      {"adam",
       {{"beta1", cfg.adam.beta1}, {"beta2", cfg.adam.beta2}, {"eps", cfg.adam.eps}}},
      {"schedule",
       {{"warmup_frac", cfg.schedule.warmup_frac},
        {"constant_frac", cfg.schedule.constant_frac},
        {"decay_frac", cfg.schedule.decay_frac}}},
      {"decode",
       {{"beam_width", cfg.decode.beam_width},
        {"lm_weight", cfg.decode.lm_weight},
        {"word_bonus", cfg.decode.word_bonus}}},
      {"identify", {{"threshold", cfg.identify_threshold}}},
      {"report", {{"bucket_width_s", cfg.report_bucket_width_s}}},
  };
  return doc.dump(2);
}

}  // namespace voxc
