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

#ifndef VOXC_TRAINER_HPP_
#define VOXC_TRAINER_HPP_

#include <string>
#include <vector>

#include "voxc/checkpoint.hpp"
#include "voxc/config.hpp"

namespace voxc {

struct MetricsRow {
  int64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double contrastive = 0.0;
  double diversity = 0.0;
  double perplexity = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<MetricsRow> metrics;
};

// Self-supervised pretraining over the manifest: encode, mask, quantize the
// unmasked latents, contextualize, contrastive + diversity loss, Adam with
// the tri-state schedule. Bit-reproducible for a fixed seed.
TrainResult pretrain_run(const PipelineConfig& cfg, const std::string& manifest_path,
                         uint64_t seed);

// CTC fine-tuning from a pretrained checkpoint: adds the character head if
// absent, disables masking, optimizes mean CTC loss. Head and body use
// separate peak learning rates; the encoder can be frozen.
TrainResult finetune_run(const PipelineConfig& cfg, const Checkpoint& pretrained,
                         const std::string& manifest_path, uint64_t seed);

// Aggregate WER of greedy decodes against the manifest transcripts.
double greedy_wer(const Model& model, const std::string& manifest_path);

// CSV with header step,lr,loss,contrastive,diversity,perplexity.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

}  // namespace voxc

#endif  // VOXC_TRAINER_HPP_
