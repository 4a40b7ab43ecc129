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

#ifndef VOXC_MODEL_HPP_
#define VOXC_MODEL_HPP_

#include <map>
#include <string>
#include <vector>

#include "voxc/audio.hpp"
#include "voxc/ctc.hpp"
#include "voxc/rng.hpp"
#include "voxc/tensor.hpp"

namespace voxc {

struct EncoderLayerSpec {
  int64_t out_channels = 0;
  int64_t kernel = 0;
  int64_t stride = 0;
};

struct EncoderConfig {
  std::vector<EncoderLayerSpec> layers;

  // kernels (10,3,3,3,2), strides (5,2,2,2,2), 64 channels throughout;
  // 16 kHz audio comes out at roughly 200 frames per second.
  static EncoderConfig desk_default();

  int64_t output_dim() const;
  // samples consumed by the first output frame
  int64_t receptive_field() const;
  void validate() const;
};

struct QuantizerConfig {
  int64_t groups = 2;   // G
  int64_t entries = 8;  // V per group
  int64_t dim = 64;     // d_q; split evenly across groups
  double tau_start = 2.0;
  double tau_floor = 0.5;
  double tau_decay = 0.999;  // multiplicative per step

  int64_t codeword_dim() const { return dim / groups; }
  double tau_at(int64_t step) const;
  void validate() const;
};

struct ContextConfig {
  int64_t d_model = 64;
  int64_t n_layers = 2;
  int64_t n_heads = 4;
  int64_t ffn_dim = 256;
  int64_t pos_kernel = 9;  // 0 disables the positional convolution
  int64_t pos_groups = 4;

  void validate() const;
};

struct MaskConfig {
  double p = 0.065;   // proportion of time steps drawn as span starts
  int64_t span = 10;  // M consecutive steps per start

  void validate() const;
};

struct MaskPlan {
  int64_t frames = 0;            // T
  std::vector<int64_t> starts;   // sorted start indices
  std::vector<int64_t> masked;   // sorted union of clipped spans
};

struct ModelConfig {
  EncoderConfig encoder;
  QuantizerConfig quantizer;
  ContextConfig context;
  MaskConfig mask;
  std::string vocab_chars{kTranscriptAlphabet};

  static ModelConfig desk_default();
  void validate() const;
};

// Named leaf parameters, iterated in sorted order everywhere so that
// optimization, checkpoints, and fingerprints are deterministic.
using ParamMap = std::map<std::string, Tensor>;

// Output frame count after the full convolution stack; fails when the input
// is shorter than the receptive field.
int64_t frame_count(const EncoderConfig& cfg, int64_t n_samples);

// Expands start indices into the clipped span union (no sampling).
MaskPlan expand_mask(int64_t frames, int64_t span, std::vector<int64_t> starts);

// Draws max(1, round(p*T)) span starts without replacement; p == 0 is the
// evaluation escape hatch producing an empty plan.
MaskPlan sample_mask(int64_t frames, const MaskConfig& cfg, Rng& rng);

struct QuantizeResult {
  Tensor quantized;              // [T, d_q], straight-through in hard mode
  Tensor probs;                  // [T, G*V] softmax of the group logits
  std::vector<double> perplexity;  // per group, of time-averaged probs
};

struct UtteranceEmbedding {
  std::vector<double> vec;  // unit length unless degenerate
  bool degenerate = false;
};

class Model {
 public:
  Model(ModelConfig cfg, ParamMap params);

  // Fresh random initialization (no CTC head).
  static Model init(const ModelConfig& cfg, Rng& rng);

  const ModelConfig& config() const { return cfg_; }
  ParamMap& params() { return params_; }
  const ParamMap& params() const { return params_; }
  Tensor& param(const std::string& name);
  const Tensor& param(const std::string& name) const;

  bool has_head() const;
  // Adds the randomly initialized d_model x (vocab+1) output layer.
  void add_ctc_head(Rng& rng);

  // Latent speech representations: [T, d_enc]; each block is
  // conv -> layer norm over channels -> GELU. Input must be normalized.
  Tensor encode(const Waveform& wave) const;

  // Gumbel-softmax product quantization of unmasked latents. noise_rng may be
  // null to disable Gumbel noise (deterministic argmax of the logits). With
  // hard=true the forward output is the argmax codeword and gradients take
  // the straight-through path.
  QuantizeResult quantize(const Tensor& z, double tau, Rng* noise_rng,
                          bool hard) const;

  // Replaces the plan's masked rows with the learned mask embedding.
  Tensor apply_mask(const Tensor& z, const MaskPlan& plan) const;

  // Context representations: input projection, convolutional relative
  // positional embedding (gelu, residual, norm), then pre-norm transformer
  // blocks. [T, d_enc] -> [T, d_model].
  Tensor contextualize(const Tensor& z) const;

  // CTC head logits [T, vocab+1] (pre log-softmax).
  Tensor ctc_head_logits(const Tensor& context) const;

  CharVocab vocab() const { return CharVocab(cfg_.vocab_chars); }

 private:
  ModelConfig cfg_;
  ParamMap params_;
};

// Time-mean of the context representations, L2-normalized; an all-zero mean
// yields the zero vector with the degenerate flag.
UtteranceEmbedding utterance_embedding(const Tensor& context);

}  // namespace voxc

#endif  // VOXC_MODEL_HPP_
