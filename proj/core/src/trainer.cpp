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

#include "voxc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "voxc/ctc.hpp"
#include "voxc/error.hpp"
#include "voxc/ops.hpp"
#include "voxc/optim.hpp"
#include "voxc/pretrain.hpp"
#include "voxc/wer.hpp"

namespace voxc {

namespace {

struct LoadedUtterance {
  UtteranceRecord record;
  Waveform wave;  // normalized
  int64_t frames = 0;
};

std::vector<LoadedUtterance> load_corpus(const PipelineConfig& cfg,
                                         const std::string& manifest_path) {
  const std::vector<UtteranceRecord> records = load_manifest(manifest_path);
  require(!records.empty(), "training: manifest '", manifest_path, "' has no rows");
  std::vector<LoadedUtterance> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    LoadedUtterance u;
    u.record = rec;
    const Waveform raw = load_wav(resolve_audio_path(manifest_path, rec));
    const NormalizedWave norm = normalize_wave(raw);
    require(!norm.degenerate, "utterance '", rec.id, "': zero-variance audio");
    u.wave = norm.wave;
    u.frames = frame_count(cfg.model.encoder,
                           static_cast<int64_t>(u.wave.samples.size()));
    out.push_back(std::move(u));
  }
  return out;
}

// Deterministic epoch-shuffled batch iterator.
class BatchCycler {
 public:
  BatchCycler(size_t n, int64_t batch_size, Rng& rng)
      : n_(n), batch_size_(static_cast<size_t>(batch_size)), rng_(rng) {}

  std::vector<size_t> next() {
    std::vector<size_t> batch;
    batch.reserve(batch_size_);
    while (batch.size() < batch_size_) {
      if (cursor_ >= order_.size()) reshuffle();
      batch.push_back(order_[cursor_++]);
    }
    return batch;
  }

 private:
  void reshuffle() {
    const auto idx = rng_.sample_without_replacement(static_cast<int64_t>(n_),
                                                     static_cast<int64_t>(n_));
    order_.assign(idx.begin(), idx.end());
    cursor_ = 0;
  }

  size_t n_;
  size_t batch_size_;
  Rng& rng_;
  std::vector<size_t> order_;
  size_t cursor_ = 0;
};

std::string batch_ids(const std::vector<LoadedUtterance>& corpus,
                      const std::vector<size_t>& batch) {
  std::string ids;
  for (const size_t i : batch) {
    if (!ids.empty()) ids += ", ";
    ids += corpus[i].record.id;
  }
  return ids;
}

}  // namespace

TrainResult pretrain_run(const PipelineConfig& cfg, const std::string& manifest_path,
                         uint64_t seed) {
  cfg.validate();
  require(cfg.model.mask.p > 0.0, "pretrain: mask.p must be positive");

  const std::vector<LoadedUtterance> corpus = load_corpus(cfg, manifest_path);
  for (const auto& u : corpus) {
    // need >= 2 span starts so every masked step has a distractor source
    const int64_t n_starts =
        std::llround(cfg.model.mask.p * static_cast<double>(u.frames));
    require(n_starts >= 2, "utterance '", u.record.id, "': ", u.frames,
            " frames yields ", std::max<int64_t>(1, n_starts),
            " mask starts; need at least 2 (longer audio or higher mask.p)");
  }

  Rng rng(seed);
  Model model = Model::init(cfg.model, rng);

  TrainResult result;
  if (cfg.pretrain.steps > 0) {
    TriStateSchedule sched;
    sched.total_updates = cfg.pretrain.steps;
    sched.peak_lr = cfg.pretrain.peak_lr;
    sched.warmup_frac = cfg.schedule.warmup_frac;
    sched.constant_frac = cfg.schedule.constant_frac;
    sched.decay_frac = cfg.schedule.decay_frac;

    Adam adam(cfg.adam);
    BatchCycler cycler(corpus.size(), cfg.pretrain.batch_size, rng);

    for (int64_t step = 0; step < cfg.pretrain.steps; ++step) {
      const std::vector<size_t> batch = cycler.next();
      std::vector<Waveform> waves;
      waves.reserve(batch.size());
      for (const size_t i : batch) waves.push_back(corpus[i].wave);

      const double tau = cfg.model.quantizer.tau_at(step);
      PretrainLossResult loss;
      try {
        loss = pretrain_loss(waves, model, tau, cfg.contrastive, cfg.pretrain_loss,
                             rng);
        for (auto& [name, t] : model.params()) t.zero_grad();
        backward(loss.loss);
      } catch (const Error& e) {
        fail("pretrain step ", step, " (utterances: ", batch_ids(corpus, batch),
             "): ", e.what());
      }
      const double lr = lr_at(sched, step);
      adam.step(model.params(), lr);

      MetricsRow row;
      row.step = step;
      row.lr = lr;
      row.loss = loss.metrics.loss;
      row.contrastive = loss.metrics.contrastive;
      row.diversity = loss.metrics.diversity;
      row.perplexity = loss.metrics.mean_perplexity();
      result.metrics.push_back(row);
    }
  }

  result.checkpoint.config = cfg;
  result.checkpoint.params = model.params();
  result.checkpoint.pretrain_steps = cfg.pretrain.steps;
  result.checkpoint.finetune_steps = 0;
  return result;
}

namespace {

void check_compatible(const PipelineConfig& cfg, const PipelineConfig& ckpt_cfg) {
  const auto& a = cfg.model;
  const auto& b = ckpt_cfg.model;
  require(a.encoder.layers.size() == b.encoder.layers.size(),
          "finetune: checkpoint has ", b.encoder.layers.size(),
          " encoder layers, config wants ", a.encoder.layers.size());
  for (size_t i = 0; i < a.encoder.layers.size(); ++i) {
    const auto& la = a.encoder.layers[i];
    const auto& lb = b.encoder.layers[i];
    require(la.out_channels == lb.out_channels && la.kernel == lb.kernel &&
                la.stride == lb.stride,
            "finetune: encoder layer ", i, " differs between checkpoint and config");
  }
  require(a.context.d_model == b.context.d_model, "finetune: checkpoint d_model=",
          b.context.d_model, " incompatible with config d_model=", a.context.d_model);
  require(a.context.n_layers == b.context.n_layers,
          "finetune: checkpoint n_layers=", b.context.n_layers,
          " incompatible with config n_layers=", a.context.n_layers);
  require(a.context.n_heads == b.context.n_heads, "finetune: checkpoint n_heads=",
          b.context.n_heads, " incompatible with config n_heads=", a.context.n_heads);
  require(a.context.ffn_dim == b.context.ffn_dim, "finetune: checkpoint ffn_dim=",
          b.context.ffn_dim, " incompatible with config ffn_dim=", a.context.ffn_dim);
  require(a.context.pos_kernel == b.context.pos_kernel,
          "finetune: checkpoint pos_kernel=", b.context.pos_kernel,
          " incompatible with config pos_kernel=", a.context.pos_kernel);
  require(a.context.pos_groups == b.context.pos_groups,
          "finetune: checkpoint pos_groups=", b.context.pos_groups,
          " incompatible with config pos_groups=", a.context.pos_groups);
  require(a.quantizer.groups == b.quantizer.groups &&
              a.quantizer.entries == b.quantizer.entries &&
              a.quantizer.dim == b.quantizer.dim,
          "finetune: quantizer shape differs between checkpoint and config");
  require(a.vocab_chars == b.vocab_chars,
          "finetune: vocabulary differs between checkpoint and config");
}

}  // namespace

TrainResult finetune_run(const PipelineConfig& cfg, const Checkpoint& pretrained,
                         const std::string& manifest_path, uint64_t seed) {
  cfg.validate();
  check_compatible(cfg, pretrained.config);

  const std::vector<LoadedUtterance> corpus = load_corpus(cfg, manifest_path);
  const CharVocab vocab(cfg.model.vocab_chars);
  for (const auto& u : corpus) {
    if (u.frames < ctc_min_frames(u.record.transcript)) {
      std::cerr << "warning: utterance '" << u.record.id << "' is infeasible for CTC ("
                << u.frames << " frames < " << ctc_min_frames(u.record.transcript)
                << " required); it will be skipped\n";
    }
  }

  Rng rng(seed);
  Model model(cfg.model, pretrained.params);
  if (!model.has_head()) model.add_ctc_head(rng);

  TrainResult result;
  if (cfg.finetune.steps > 0) {
    TriStateSchedule head_sched, body_sched;
    head_sched.total_updates = body_sched.total_updates = cfg.finetune.steps;
    head_sched.peak_lr = cfg.finetune.head_peak_lr;
    body_sched.peak_lr = cfg.finetune.body_peak_lr;
    for (TriStateSchedule* s : {&head_sched, &body_sched}) {
      s->warmup_frac = cfg.schedule.warmup_frac;
      s->constant_frac = cfg.schedule.constant_frac;
      s->decay_frac = cfg.schedule.decay_frac;
    }

    Adam adam(cfg.adam);
    BatchCycler cycler(corpus.size(), cfg.finetune.batch_size, rng);

    for (int64_t step = 0; step < cfg.finetune.steps; ++step) {
      const std::vector<size_t> batch = cycler.next();
      try {
        Tensor loss_sum;
        int64_t feasible = 0;
        for (const size_t i : batch) {
          const Tensor context = model.contextualize(model.encode(corpus[i].wave));
          const Tensor logp = ops::log_softmax_rows(model.ctc_head_logits(context));
          const CtcLoss term = ctc_loss(logp, corpus[i].record.transcript, vocab);
          if (!term.feasible) continue;
          loss_sum = feasible == 0 ? term.loss : ops::add(loss_sum, term.loss);
          ++feasible;
        }
        require(feasible > 0, "no feasible CTC sample in batch");
        const Tensor loss =
            ops::scale(loss_sum, 1.0 / static_cast<double>(feasible));

        for (auto& [name, t] : model.params()) t.zero_grad();
        backward(loss);

        const double head_lr = lr_at(head_sched, step);
        const double body_lr = lr_at(body_sched, step);
        const bool freeze = cfg.finetune.freeze_encoder;
        adam.step(model.params(), [&](const std::string& name) {
          if (name.rfind("head.", 0) == 0) return head_lr;
          if (freeze && name.rfind("enc.", 0) == 0) return 0.0;
          return body_lr;
        });

        MetricsRow row;
        row.step = step;
        row.lr = head_lr;
        row.loss = loss.item();
        result.metrics.push_back(row);
      } catch (const Error& e) {
        fail("finetune step ", step, " (utterances: ", batch_ids(corpus, batch),
             "): ", e.what());
      }
    }
  }

  result.checkpoint.config = cfg;
  result.checkpoint.params = model.params();
  result.checkpoint.pretrain_steps = pretrained.pretrain_steps;
  result.checkpoint.finetune_steps = cfg.finetune.steps;
  return result;
}

double greedy_wer(const Model& model, const std::string& manifest_path) {
  const std::vector<UtteranceRecord> records = load_manifest(manifest_path);
  require(!records.empty(), "greedy_wer: empty manifest");
  const CharVocab vocab = model.vocab();
  int64_t errors = 0, ref_words = 0;
  for (const auto& rec : records) {
    const Waveform raw = load_wav(resolve_audio_path(manifest_path, rec));
    const NormalizedWave norm = normalize_wave(raw);
    require(!norm.degenerate, "greedy_wer: utterance '", rec.id,
            "': zero-variance audio");
    const Tensor context = model.contextualize(model.encode(norm.wave));
    const Tensor logp = ops::log_softmax_rows(model.ctc_head_logits(context));
    const WerResult w = wer(rec.transcript, ctc_greedy(logp, vocab));
    errors += w.errors();
    ref_words += w.reference_words;
  }
  return static_cast<double>(errors) /
         static_cast<double>(std::max<int64_t>(1, ref_words));
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "step,lr,loss,contrastive,diversity,perplexity\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  static_cast<long long>(r.step), r.lr, r.loss, r.contrastive,
                  r.diversity, r.perplexity);
    out << buf;
  }
  return out.str();
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  require(out.good(), "write_metrics_csv: cannot open '", path, "'");
  out << metrics_csv(rows);
  require(out.good(), "write_metrics_csv: write failed for '", path, "'");
}

}  // namespace voxc
