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

#ifndef VOXC_CHECKPOINT_HPP_
#define VOXC_CHECKPOINT_HPP_

#include <string>

#include "voxc/config.hpp"
#include "voxc/model.hpp"

namespace voxc {

// Versioned binary snapshot of every parameter plus the full config and step
// counters. Save -> load -> save is byte-identical.
struct Checkpoint {
  PipelineConfig config;
  ParamMap params;
  int64_t pretrain_steps = 0;
  int64_t finetune_steps = 0;
};

// Layout: magic VXCP, version u8, length-prefixed JSON block (config and step
// counters), then named parameter records (name, shape, little-endian
// doubles) in sorted name order.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Reconstructs a usable model (parameters marked trainable).
Model checkpoint_model(const Checkpoint& ckpt);

// FNV-1a hash of a file's bytes; ties speaker profiles to one checkpoint.
uint64_t file_fingerprint(const std::string& path);
std::string fingerprint_hex(uint64_t fp);

}  // namespace voxc

#endif  // VOXC_CHECKPOINT_HPP_
