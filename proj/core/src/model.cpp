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

#include "voxc/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "voxc/error.hpp"
#include "voxc/ops.hpp"

namespace voxc {

namespace {
constexpr double kLayerNormEps = 1e-5;
}

EncoderConfig EncoderConfig::desk_default() {
  EncoderConfig cfg;
  cfg.layers = {{64, 10, 5}, {64, 3, 2}, {64, 3, 2}, {64, 3, 2}, {64, 2, 2}};
  return cfg;
}

int64_t EncoderConfig::output_dim() const {
  require(!layers.empty(), "EncoderConfig: no layers");
  return layers.back().out_channels;
}

int64_t EncoderConfig::receptive_field() const {
  // invert the length recurrence for one output frame
  int64_t n = 1;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it)
    n = (n - 1) * it->stride + it->kernel;
  return n;
}

void EncoderConfig::validate() const {
  require(!layers.empty(), "EncoderConfig: at least one layer required");
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    require(l.out_channels >= 1, "EncoderConfig: layer ", i, ": out_channels < 1");
    require(l.stride >= 1, "EncoderConfig: layer ", i, ": stride < 1");
    require(l.kernel >= l.stride, "EncoderConfig: layer ", i, ": kernel ", l.kernel,
            " < stride ", l.stride);
  }
}

double QuantizerConfig::tau_at(int64_t step) const {
  require(step >= 0, "QuantizerConfig::tau_at: negative step");
  return std::max(tau_floor, tau_start * std::pow(tau_decay, static_cast<double>(step)));
}

void QuantizerConfig::validate() const {
  require(groups >= 1, "QuantizerConfig: groups must be >= 1");
  require(entries >= 2, "QuantizerConfig: entries must be >= 2");
  require(dim >= groups && dim % groups == 0, "QuantizerConfig: dim ", dim,
          " not divisible by groups ", groups);
  require(tau_floor > 0.0 && tau_start >= tau_floor,
          "QuantizerConfig: need tau_start >= tau_floor > 0");
  require(tau_decay > 0.0 && tau_decay <= 1.0,
          "QuantizerConfig: tau_decay must be in (0, 1]");
}

void ContextConfig::validate() const {
  require(d_model >= 1 && n_layers >= 0 && n_heads >= 1 && ffn_dim >= 1,
          "ContextConfig: non-positive dimension");
  require(d_model % n_heads == 0, "ContextConfig: d_model ", d_model,
          " not divisible by n_heads ", n_heads);
  require(pos_kernel >= 0, "ContextConfig: pos_kernel must be >= 0");
  if (pos_kernel > 0) {
    require(pos_groups >= 1 && d_model % pos_groups == 0, "ContextConfig: d_model ",
            d_model, " not divisible by pos_groups ", pos_groups);
  }
}

void MaskConfig::validate() const {
  require(p >= 0.0 && p <= 1.0, "MaskConfig: p must be in [0, 1], got ", p);
  require(span >= 1, "MaskConfig: span must be >= 1, got ", span);
}

ModelConfig ModelConfig::desk_default() {
  ModelConfig cfg;
  cfg.encoder = EncoderConfig::desk_default();
  return cfg;
}

void ModelConfig::validate() const {
  encoder.validate();
  quantizer.validate();
  context.validate();
  mask.validate();
  require(!vocab_chars.empty(), "ModelConfig: empty vocabulary");
  require(quantizer.dim == context.d_model,
          "ModelConfig: quantizer dim ", quantizer.dim,
          " must equal d_model ", context.d_model,
          " for the contrastive comparison");
}

int64_t frame_count(const EncoderConfig& cfg, int64_t n_samples) {
  cfg.validate();
  int64_t len = n_samples;
  for (size_t i = 0; i < cfg.layers.size(); ++i) {
    const auto& l = cfg.layers[i];
    require(len >= l.kernel, "frame_count: input of ", n_samples,
            " samples is shorter than the receptive field (",
            cfg.receptive_field(), ")");
    len = (len - l.kernel) / l.stride + 1;
  }
  return len;
}

MaskPlan expand_mask(int64_t frames, int64_t span, std::vector<int64_t> starts) {
  require(frames >= 1, "expand_mask: frames must be >= 1");
  require(span >= 1, "expand_mask: span must be >= 1");
  std::sort(starts.begin(), starts.end());
  std::set<int64_t> masked;
  for (const int64_t s : starts) {
    require(s >= 0 && s < frames, "expand_mask: start ", s, " out of [0, ", frames, ")");
    const int64_t end = std::min(s + span, frames);
    for (int64_t t = s; t < end; ++t) masked.insert(t);
  }
  MaskPlan plan;
  plan.frames = frames;
  plan.starts = std::move(starts);
  plan.masked.assign(masked.begin(), masked.end());
  return plan;
}

MaskPlan sample_mask(int64_t frames, const MaskConfig& cfg, Rng& rng) {
  require(frames >= 1, "sample_mask: frames must be >= 1");
  cfg.validate();
  int64_t n_starts = 0;
  if (cfg.p > 0.0) {
    n_starts = std::max<int64_t>(
        1, std::llround(cfg.p * static_cast<double>(frames)));
    n_starts = std::min(n_starts, frames);
  }
  std::vector<int64_t> starts = rng.sample_without_replacement(frames, n_starts);
  return expand_mask(frames, cfg.span, std::move(starts));
}

namespace {

std::string idx_name(const char* prefix, size_t i, const char* suffix) {
  return std::string(prefix) + std::to_string(i) + suffix;
}

}  // namespace

Model::Model(ModelConfig cfg, ParamMap params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
}

Tensor& Model::param(const std::string& name) {
  const auto it = params_.find(name);
  require(it != params_.end(), "model parameter '", name, "' not found");
  return it->second;
}

const Tensor& Model::param(const std::string& name) const {
  const auto it = params_.find(name);
  require(it != params_.end(), "model parameter '", name, "' not found");
  return it->second;
}

bool Model::has_head() const { return params_.count("head.w") == 1; }

Model Model::init(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  ParamMap p;

  int64_t in_ch = 1;
  for (size_t i = 0; i < cfg.encoder.layers.size(); ++i) {
    const auto& l = cfg.encoder.layers[i];
    const double std = 1.0 / std::sqrt(static_cast<double>(in_ch * l.kernel));
    p[idx_name("enc.", i, ".w")] =
        Tensor::randn({l.out_channels, in_ch, l.kernel}, rng, std, true);
    p[idx_name("enc.", i, ".b")] = Tensor::zeros({l.out_channels}, true);
    p[idx_name("enc.", i, ".ln_g")] = Tensor::full({l.out_channels}, 1.0, true);
    p[idx_name("enc.", i, ".ln_b")] = Tensor::zeros({l.out_channels}, true);
    in_ch = l.out_channels;
  }
  const int64_t d_enc = cfg.encoder.output_dim();

  const int64_t cw = cfg.quantizer.codeword_dim();
  for (int64_t g = 0; g < cfg.quantizer.groups; ++g) {
    const double std = 1.0 / std::sqrt(static_cast<double>(d_enc));
    p[idx_name("quant.", static_cast<size_t>(g), ".proj_w")] =
        Tensor::randn({d_enc, cfg.quantizer.entries}, rng, std, true);
    p[idx_name("quant.", static_cast<size_t>(g), ".proj_b")] =
        Tensor::zeros({cfg.quantizer.entries}, true);
    p[idx_name("quant.", static_cast<size_t>(g), ".codebook")] = Tensor::randn(
        {cfg.quantizer.entries, cw}, rng, 1.0 / std::sqrt(static_cast<double>(cw)),
        true);
  }

  p["mask_emb"] = Tensor::randn({d_enc}, rng, 0.1, true);

  const int64_t d = cfg.context.d_model;
  p["ctx.in_w"] =
      Tensor::randn({d_enc, d}, rng, 1.0 / std::sqrt(static_cast<double>(d_enc)), true);
  p["ctx.in_b"] = Tensor::zeros({d}, true);
  if (cfg.context.pos_kernel > 0) {
    const int64_t cpg = d / cfg.context.pos_groups;
    const double std = 1.0 / std::sqrt(static_cast<double>(cpg * cfg.context.pos_kernel));
    for (int64_t g = 0; g < cfg.context.pos_groups; ++g) {
      p[idx_name("ctx.pos.", static_cast<size_t>(g), ".w")] =
          Tensor::randn({cpg, cpg, cfg.context.pos_kernel}, rng, std, true);
      p[idx_name("ctx.pos.", static_cast<size_t>(g), ".b")] = Tensor::zeros({cpg}, true);
    }
    p["ctx.pos_ln_g"] = Tensor::full({d}, 1.0, true);
    p["ctx.pos_ln_b"] = Tensor::zeros({d}, true);
  }
  const double mstd = 1.0 / std::sqrt(static_cast<double>(d));
  for (int64_t i = 0; i < cfg.context.n_layers; ++i) {
    const std::string base = "ctx.layer" + std::to_string(i) + ".";
    p[base + "ln1_g"] = Tensor::full({d}, 1.0, true);
    p[base + "ln1_b"] = Tensor::zeros({d}, true);
    for (const char* w : {"wq", "wk", "wv", "wo"})
      p[base + w] = Tensor::randn({d, d}, rng, mstd, true);
    for (const char* b : {"bq", "bk", "bv", "bo"}) p[base + b] = Tensor::zeros({d}, true);
    p[base + "ln2_g"] = Tensor::full({d}, 1.0, true);
    p[base + "ln2_b"] = Tensor::zeros({d}, true);
    p[base + "ffn_w1"] = Tensor::randn({d, cfg.context.ffn_dim}, rng, mstd, true);
    p[base + "ffn_b1"] = Tensor::zeros({cfg.context.ffn_dim}, true);
    p[base + "ffn_w2"] =
        Tensor::randn({cfg.context.ffn_dim, d}, rng,
                      1.0 / std::sqrt(static_cast<double>(cfg.context.ffn_dim)), true);
    p[base + "ffn_b2"] = Tensor::zeros({d}, true);
  }

  return Model(cfg, std::move(p));
}

void Model::add_ctc_head(Rng& rng) {
  require(!has_head(), "add_ctc_head: head already present");
  const int64_t d = cfg_.context.d_model;
  const int64_t width = CharVocab(cfg_.vocab_chars).size_with_blank();
  params_["head.w"] =
      Tensor::randn({d, width}, rng, 1.0 / std::sqrt(static_cast<double>(d)), true);
  params_["head.b"] = Tensor::zeros({width}, true);
}

Tensor Model::encode(const Waveform& wave) const {
  require(!wave.samples.empty(), "encode: empty waveform");
  frame_count(cfg_.encoder, static_cast<int64_t>(wave.samples.size()));

  Tensor x = Tensor::from_values({1, static_cast<int64_t>(wave.samples.size())},
                                 wave.samples);
  const size_t n_layers = cfg_.encoder.layers.size();
  for (size_t i = 0; i < n_layers; ++i) {
    const auto& l = cfg_.encoder.layers[i];
    x = ops::conv1d(x, param(idx_name("enc.", i, ".w")), param(idx_name("enc.", i, ".b")),
                    l.stride);
    x = ops::transpose(x);  // [frames, channels]
    x = ops::layer_norm(x, param(idx_name("enc.", i, ".ln_g")),
                        param(idx_name("enc.", i, ".ln_b")), kLayerNormEps);
    x = ops::gelu(x);
    if (i + 1 < n_layers) x = ops::transpose(x);
  }
  return x;  // [T, d_enc]
}

QuantizeResult Model::quantize(const Tensor& z, double tau, Rng* noise_rng,
                               bool hard) const {
  require(tau > 0.0, "quantize: tau must be positive, got ", tau);
  require(z.rank() == 2 && z.dim(1) == cfg_.encoder.output_dim(),
          "quantize: expected [T, ", cfg_.encoder.output_dim(), "] input");
  const int64_t T = z.dim(0);
  const int64_t V = cfg_.quantizer.entries;

  std::vector<Tensor> q_parts, prob_parts;
  QuantizeResult out;
  for (int64_t g = 0; g < cfg_.quantizer.groups; ++g) {
    const auto& proj_w = param(idx_name("quant.", static_cast<size_t>(g), ".proj_w"));
    const auto& proj_b = param(idx_name("quant.", static_cast<size_t>(g), ".proj_b"));
    const auto& codebook = param(idx_name("quant.", static_cast<size_t>(g), ".codebook"));

    Tensor logits = ops::add(ops::matmul(z, proj_w), proj_b);  // [T, V]
    prob_parts.push_back(ops::row_softmax(logits));

    Tensor noisy = logits;
    if (noise_rng != nullptr) {
      std::vector<double> noise(static_cast<size_t>(T * V));
      for (auto& v : noise) v = noise_rng->gumbel();
      noisy = ops::add(noisy, Tensor::from_values({T, V}, std::move(noise)));
    }
    const Tensor weights = ops::row_softmax(ops::scale(noisy, 1.0 / tau));

    Tensor q_soft = ops::matmul(weights, codebook);  // [T, cw]
    if (hard) {
      const std::vector<int64_t> pick = ops::argmax_rows(weights);
      const Tensor q_hard = ops::embedding_rows(ops::detach(codebook), pick);
      // straight-through: forward takes the hard codeword, gradient the soft path
      q_parts.push_back(ops::add(q_soft, ops::sub(q_hard, ops::detach(q_soft))));
    } else {
      q_parts.push_back(q_soft);
    }

    // per-group perplexity of the time-averaged softmax distribution
    const auto& pv = prob_parts.back().values();
    std::vector<double> avg(static_cast<size_t>(V), 0.0);
    for (int64_t t = 0; t < T; ++t)
      for (int64_t v = 0; v < V; ++v)
        avg[static_cast<size_t>(v)] += pv[static_cast<size_t>(t * V + v)];
    double entropy = 0.0;
    for (auto& a : avg) {
      a /= static_cast<double>(T);
      if (a > 0.0) entropy -= a * std::log(a);
    }
    out.perplexity.push_back(std::exp(entropy));
  }

  out.quantized = cfg_.quantizer.groups == 1 ? q_parts[0] : ops::concat_cols(q_parts);
  out.probs = prob_parts.size() == 1 ? prob_parts[0] : ops::concat_cols(prob_parts);
  return out;
}

Tensor Model::apply_mask(const Tensor& z, const MaskPlan& plan) const {
  require(z.rank() == 2, "apply_mask: expected a 2-D latent tensor");
  require(plan.frames == z.dim(0), "apply_mask: plan covers ", plan.frames,
          " frames but input has ", z.dim(0));
  return ops::mask_rows(z, plan.masked, param("mask_emb"));
}

namespace {

Tensor positional_conv(const Tensor& h, const ContextConfig& cfg,
                       const Model& model) {
  const int64_t T = h.dim(0), d = h.dim(1);
  const int64_t k = cfg.pos_kernel;
  const int64_t pad_left = (k - 1) / 2, pad_right = k - 1 - pad_left;
  Tensor ht = ops::transpose(h);  // [d, T]
  std::vector<Tensor> padded_parts;
  if (pad_left > 0) padded_parts.push_back(Tensor::zeros({d, pad_left}));
  padded_parts.push_back(ht);
  if (pad_right > 0) padded_parts.push_back(Tensor::zeros({d, pad_right}));
  const Tensor padded =
      padded_parts.size() == 1 ? padded_parts[0] : ops::concat_cols(padded_parts);

  const int64_t cpg = d / cfg.pos_groups;
  std::vector<Tensor> groups;
  for (int64_t g = 0; g < cfg.pos_groups; ++g) {
    const Tensor xg = ops::slice_rows(padded, g * cpg, cpg);
    groups.push_back(ops::conv1d(
        xg, model.param("ctx.pos." + std::to_string(g) + ".w"),
        model.param("ctx.pos." + std::to_string(g) + ".b"), 1));
  }
  Tensor conv = groups.size() == 1 ? groups[0] : ops::concat_rows(groups);  // [d, T]
  (void)T;
  return ops::transpose(conv);  // [T, d]
}

}  // namespace

Tensor Model::contextualize(const Tensor& z) const {
  require(z.rank() == 2 && z.dim(1) == cfg_.encoder.output_dim(),
          "contextualize: expected [T, ", cfg_.encoder.output_dim(), "] input, got [",
          z.dim(0), ", ", z.dim(1), "]");
  const auto& ctx = cfg_.context;
  const int64_t d = ctx.d_model;
  const int64_t dh = d / ctx.n_heads;

  Tensor h = ops::add(ops::matmul(z, param("ctx.in_w")), param("ctx.in_b"));

  if (ctx.pos_kernel > 0) {
    const Tensor pos = ops::gelu(positional_conv(h, ctx, *this));
    h = ops::layer_norm(ops::add(h, pos), param("ctx.pos_ln_g"), param("ctx.pos_ln_b"),
                        kLayerNormEps);
  }

  for (int64_t i = 0; i < ctx.n_layers; ++i) {
    const std::string base = "ctx.layer" + std::to_string(i) + ".";
    // pre-norm self-attention
    const Tensor a_in =
        ops::layer_norm(h, param(base + "ln1_g"), param(base + "ln1_b"), kLayerNormEps);
    const Tensor q = ops::add(ops::matmul(a_in, param(base + "wq")), param(base + "bq"));
    const Tensor k = ops::add(ops::matmul(a_in, param(base + "wk")), param(base + "bk"));
    const Tensor v = ops::add(ops::matmul(a_in, param(base + "wv")), param(base + "bv"));
    std::vector<Tensor> heads;
    for (int64_t hh = 0; hh < ctx.n_heads; ++hh) {
      const Tensor qh = ops::slice_cols(q, hh * dh, dh);
      const Tensor kh = ops::slice_cols(k, hh * dh, dh);
      const Tensor vh = ops::slice_cols(v, hh * dh, dh);
      const Tensor scores = ops::scale(ops::matmul(qh, ops::transpose(kh)),
                                       1.0 / std::sqrt(static_cast<double>(dh)));
      heads.push_back(ops::matmul(ops::row_softmax(scores), vh));
    }
    const Tensor attn = heads.size() == 1 ? heads[0] : ops::concat_cols(heads);
    h = ops::add(h, ops::add(ops::matmul(attn, param(base + "wo")), param(base + "bo")));

    // pre-norm GELU feed-forward
    const Tensor f_in =
        ops::layer_norm(h, param(base + "ln2_g"), param(base + "ln2_b"), kLayerNormEps);
    const Tensor f1 =
        ops::gelu(ops::add(ops::matmul(f_in, param(base + "ffn_w1")), param(base + "ffn_b1")));
    h = ops::add(h, ops::add(ops::matmul(f1, param(base + "ffn_w2")), param(base + "ffn_b2")));
  }
  return h;
}

Tensor Model::ctc_head_logits(const Tensor& context) const {
  require(has_head(), "model has no CTC head; fine-tune first");
  return ops::add(ops::matmul(context, param("head.w")), param("head.b"));
}

UtteranceEmbedding utterance_embedding(const Tensor& context) {
  require(context.defined() && context.rank() == 2 && context.dim(0) >= 1,
          "utterance_embedding: empty context");
  const int64_t T = context.dim(0), d = context.dim(1);
  UtteranceEmbedding out;
  out.vec.assign(static_cast<size_t>(d), 0.0);
  const double* cv = context.values().data();
  for (int64_t t = 0; t < T; ++t)
    for (int64_t j = 0; j < d; ++j) out.vec[static_cast<size_t>(j)] += cv[t * d + j];
  double norm2 = 0.0;
  for (auto& x : out.vec) {
    x /= static_cast<double>(T);
    norm2 += x * x;
  }
  if (norm2 < 1e-24) {
    out.degenerate = true;
    out.vec.assign(static_cast<size_t>(d), 0.0);
    return out;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : out.vec) x *= inv;
  return out;
}

}  // namespace voxc
