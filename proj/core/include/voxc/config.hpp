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

#ifndef VOXC_CONFIG_HPP_
#define VOXC_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "voxc/beam.hpp"
#include "voxc/model.hpp"
#include "voxc/optim.hpp"
#include "voxc/pretrain.hpp"

namespace voxc {

struct PretrainRunConfig {
  int64_t steps = 500;
  double peak_lr = 5e-4;
  int64_t batch_size = 4;
};

struct FinetuneRunConfig {
  int64_t steps = 2000;
  double head_peak_lr = 3e-5;
  double body_peak_lr = 1e-5;
  int64_t batch_size = 4;
  bool freeze_encoder = false;
};

struct ScheduleShape {
  double warmup_frac = 0.10;
  double constant_frac = 0.40;
  double decay_frac = 0.50;
};

// Every tunable in one document; mirrors the CLI's JSON config file.
struct PipelineConfig {
  uint64_t seed = 42;
  ModelConfig model = ModelConfig::desk_default();
  ContrastiveConfig contrastive;
  PretrainLossConfig pretrain_loss;
  PretrainRunConfig pretrain;
  FinetuneRunConfig finetune;
  AdamConfig adam;
  ScheduleShape schedule;
  DecodeConfig decode;
  double identify_threshold = 0.25;
  double report_bucket_width_s = 2.0;

  void validate() const;
};

// Strict parse: unknown keys are rejected, absent keys keep their defaults.
PipelineConfig parse_config_json(const std::string& json_text);
PipelineConfig load_config_file(const std::string& path);

// Canonical serialization (sorted keys); parse(config_to_json(c)) == c.
std::string config_to_json(const PipelineConfig& cfg);

}  // namespace voxc

#endif  // VOXC_CONFIG_HPP_
