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

#ifndef VOXC_PRETRAIN_HPP_
#define VOXC_PRETRAIN_HPP_

#include <vector>

#include "voxc/audio.hpp"
#include "voxc/model.hpp"
#include "voxc/rng.hpp"
#include "voxc/tensor.hpp"

namespace voxc {

struct ContrastiveConfig {
  int64_t distractors = 10;  // K
  double kappa = 0.1;        // similarity temperature

  void validate() const;
};

struct PretrainLossConfig {
  double alpha = 0.1;  // diversity-loss weight

  void validate() const;
};

// K indices drawn uniformly with replacement from plan.masked minus t.
// Fails when t is the only masked step.
std::vector<int64_t> sample_distractors(const MaskPlan& plan, int64_t t, int64_t k,
                                        Rng& rng);

// -log softmax probability of the true candidate among {q_true} union
// distractors, scores = cos / kappa. All vectors must share one shape;
// zero-norm vectors are rejected (cosine undefined).
Tensor contrastive_loss(const Tensor& c, const Tensor& q_true,
                        const std::vector<Tensor>& distractor_qs, double kappa);

// (G*V - sum_g exp(H_g)) / (G*V) over a [G, V] row-stochastic matrix of
// averaged codeword probabilities; 0 when uniform, 1 - 1/V when one-hot.
Tensor diversity_loss(const Tensor& avg_probs);

struct PretrainMetrics {
  double loss = 0.0;
  double contrastive = 0.0;
  double diversity = 0.0;
  std::vector<double> perplexity;  // per group, batch+time averaged
  double mean_perplexity() const;
};

struct PretrainLossResult {
  Tensor loss;
  PretrainMetrics metrics;
};

// Full self-supervised objective over one batch of normalized utterances:
// mean contrastive term over every masked step plus alpha * diversity of the
// batch+time-averaged codeword probabilities. `tau` is the current Gumbel
// temperature. All randomness (masks, noise, distractors) comes from rng, so
// a copied Rng replays the loss exactly.
PretrainLossResult pretrain_loss(const std::vector<Waveform>& batch,
                                 const Model& model, double tau,
                                 const ContrastiveConfig& contrastive,
                                 const PretrainLossConfig& loss_cfg, Rng& rng);

}  // namespace voxc

#endif  // VOXC_PRETRAIN_HPP_
