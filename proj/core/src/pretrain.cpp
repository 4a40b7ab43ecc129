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

#include "voxc/pretrain.hpp"

#include <algorithm>
#include <cmath>

#include "voxc/error.hpp"
#include "voxc/ops.hpp"

namespace voxc {

void ContrastiveConfig::validate() const {
  require(distractors >= 0, "ContrastiveConfig: K must be >= 0, got ", distractors);
  require(kappa > 0.0, "ContrastiveConfig: kappa must be positive, got ", kappa);
}

void PretrainLossConfig::validate() const {
  require(alpha >= 0.0, "PretrainLossConfig: alpha must be >= 0, got ", alpha);
}

std::vector<int64_t> sample_distractors(const MaskPlan& plan, int64_t t, int64_t k,
                                        Rng& rng) {
  require(std::binary_search(plan.masked.begin(), plan.masked.end(), t),
          "sample_distractors: t=", t, " is not a masked step");
  std::vector<int64_t> support;
  support.reserve(plan.masked.size());
  for (const int64_t m : plan.masked)
    if (m != t) support.push_back(m);
  require(!support.empty(),
          "sample_distractors: no other masked steps to draw from (t=", t, ")");
  std::vector<int64_t> out(static_cast<size_t>(k));
  for (auto& idx : out)
    idx = support[static_cast<size_t>(
        rng.uniform_int(static_cast<int64_t>(support.size())))];
  return out;
}

namespace {

// cosine similarity of two equal-shape tensors viewed as flat vectors
Tensor cosine(const Tensor& a, const Tensor& b) {
  const Tensor dot = ops::sum_all(ops::mul(a, b));
  const Tensor na = ops::power(ops::sum_all(ops::mul(a, a)), 0.5);
  const Tensor nb = ops::power(ops::sum_all(ops::mul(b, b)), 0.5);
  require(na.item() > 0.0 && nb.item() > 0.0,
          "contrastive_loss: zero-norm vector, cosine undefined");
  return ops::mul(dot, ops::power(ops::mul(na, nb), -1.0));
}

}  // namespace

Tensor contrastive_loss(const Tensor& c, const Tensor& q_true,
                        const std::vector<Tensor>& distractor_qs, double kappa) {
  require(kappa > 0.0, "contrastive_loss: kappa must be positive");
  require(c.defined() && q_true.defined(), "contrastive_loss: undefined input");
  require(c.shape() == q_true.shape(), "contrastive_loss: shape mismatch");
  for (const auto& d : distractor_qs)
    require(d.shape() == c.shape(), "contrastive_loss: distractor shape mismatch");

  std::vector<Tensor> scores;
  scores.reserve(distractor_qs.size() + 1);
  scores.push_back(ops::scale(cosine(c, q_true), 1.0 / kappa));
  for (const auto& d : distractor_qs)
    scores.push_back(ops::scale(cosine(c, d), 1.0 / kappa));

  if (scores.size() == 1) {
    // lone candidate: -log softmax == 0, but keep the graph alive
    return ops::sub(scores[0], scores[0]);
  }

  // stable log-sum-exp with a constant shift
  double m = scores[0].item();
  for (const auto& s : scores) m = std::max(m, s.item());
  std::vector<Tensor> shifted;
  shifted.reserve(scores.size());
  for (const auto& s : scores)
    shifted.push_back(ops::reshape(ops::add_scalar(s, -m), {1, 1}));
  const Tensor lse =
      ops::add_scalar(ops::log(ops::sum_all(ops::exp(ops::concat_rows(shifted)))), m);
  return ops::sub(lse, scores[0]);
}

Tensor diversity_loss(const Tensor& avg_probs) {
  require(avg_probs.defined() && avg_probs.rank() == 2,
          "diversity_loss: expected a [G, V] matrix");
  const int64_t G = avg_probs.dim(0), V = avg_probs.dim(1);
  const double* pv = avg_probs.values().data();
  for (int64_t g = 0; g < G; ++g) {
    double sum = 0.0;
    for (int64_t v = 0; v < V; ++v) {
      require(pv[g * V + v] >= 0.0, "diversity_loss: negative probability");
      sum += pv[g * V + v];
    }
    require(std::abs(sum - 1.0) <= 1e-6, "diversity_loss: group ", g,
            " does not sum to 1 (", sum, ")");
  }
  const Tensor entropy = ops::scale(ops::sum_axis(ops::xlogx(avg_probs), 1), -1.0);
  const Tensor perp_sum = ops::sum_all(ops::exp(entropy));
  const double gv = static_cast<double>(G * V);
  return ops::scale(ops::add_scalar(ops::scale(perp_sum, -1.0), gv), 1.0 / gv);
}

double PretrainMetrics::mean_perplexity() const {
  if (perplexity.empty()) return 0.0;
  double s = 0.0;
  for (const double p : perplexity) s += p;
  return s / static_cast<double>(perplexity.size());
}

PretrainLossResult pretrain_loss(const std::vector<Waveform>& batch,
                                 const Model& model, double tau,
                                 const ContrastiveConfig& contrastive,
                                 const PretrainLossConfig& loss_cfg, Rng& rng) {
  contrastive.validate();
  loss_cfg.validate();
  require(!batch.empty(), "pretrain_loss: empty batch");

  const auto& qcfg = model.config().quantizer;
  const int64_t G = qcfg.groups, V = qcfg.entries;

  Tensor contrastive_sum;
  int64_t n_terms = 0;
  Tensor prob_row_sum;  // [G*V], sum over all frames of all utterances
  int64_t total_frames = 0;

  for (const Waveform& wave : batch) {
    const Tensor z = model.encode(wave);
    const MaskPlan plan = sample_mask(z.dim(0), model.config().mask, rng);
    require(plan.masked.size() >= 2, "pretrain_loss: utterance yields ",
            plan.masked.size(), " masked steps; need at least 2");
    const Tensor z_masked = model.apply_mask(z, plan);
    const Tensor context = model.contextualize(z_masked);
    const QuantizeResult q = model.quantize(z, tau, &rng, /*hard=*/true);

    for (const int64_t t : plan.masked) {
      const Tensor c_t = ops::slice_rows(context, t, 1);
      const Tensor q_t = ops::slice_rows(q.quantized, t, 1);
      std::vector<Tensor> negs;
      negs.reserve(static_cast<size_t>(contrastive.distractors));
      for (const int64_t d :
           sample_distractors(plan, t, contrastive.distractors, rng))
        negs.push_back(ops::slice_rows(q.quantized, d, 1));
      const Tensor term = contrastive_loss(c_t, q_t, negs, contrastive.kappa);
      contrastive_sum = n_terms == 0 ? term : ops::add(contrastive_sum, term);
      ++n_terms;
    }

    const Tensor frame_prob_sum = ops::sum_axis(q.probs, 0);  // [G*V]
    prob_row_sum =
        total_frames == 0 ? frame_prob_sum : ops::add(prob_row_sum, frame_prob_sum);
    total_frames += z.dim(0);
  }

  const Tensor contrastive_mean =
      ops::scale(contrastive_sum, 1.0 / static_cast<double>(n_terms));
  const Tensor avg_probs = ops::reshape(
      ops::scale(prob_row_sum, 1.0 / static_cast<double>(total_frames)), {G, V});
  const Tensor diversity = diversity_loss(avg_probs);

  PretrainLossResult out;
  out.loss = ops::add(contrastive_mean, ops::scale(diversity, loss_cfg.alpha));
  out.metrics.loss = out.loss.item();
  out.metrics.contrastive = contrastive_mean.item();
  out.metrics.diversity = diversity.item();
  const double* ap = avg_probs.values().data();
  for (int64_t g = 0; g < G; ++g) {
    double entropy = 0.0;
    for (int64_t v = 0; v < V; ++v) {
      const double p = ap[g * V + v];
      if (p > 0.0) entropy -= p * std::log(p);
    }
    out.metrics.perplexity.push_back(std::exp(entropy));
  }
  return out;
}

}  // namespace voxc
