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

#include "voxc/optim.hpp"

#include <cmath>

#include "voxc/error.hpp"

namespace voxc {

void TriStateSchedule::validate() const {
  require(total_updates >= 1, "TriStateSchedule: total_updates must be >= 1");
  require(peak_lr >= 0.0, "TriStateSchedule: peak_lr must be >= 0");
  require(warmup_frac >= 0.0 && constant_frac >= 0.0 && decay_frac >= 0.0,
          "TriStateSchedule: negative phase fraction");
  require(std::abs(warmup_frac + constant_frac + decay_frac - 1.0) <= 1e-12,
          "TriStateSchedule: phase fractions must sum to 1, got ",
          warmup_frac + constant_frac + decay_frac);
}

double lr_at(const TriStateSchedule& sched, int64_t step) {
  sched.validate();
  require(step >= 0 && step <= sched.total_updates, "lr_at: step ", step,
          " outside [0, ", sched.total_updates, "]");
  const double total = static_cast<double>(sched.total_updates);
  const double s = static_cast<double>(step);
  const double warm_end = sched.warmup_frac * total;
  const double hold_end = (sched.warmup_frac + sched.constant_frac) * total;
  if (s <= warm_end) {
    return warm_end == 0.0 ? sched.peak_lr : sched.peak_lr * (s / warm_end);
  }
  if (s <= hold_end) return sched.peak_lr;
  const double decay_span = total - hold_end;
  return decay_span == 0.0 ? 0.0 : sched.peak_lr * ((total - s) / decay_span);
}

void AdamConfig::validate() const {
  require(beta1 >= 0.0 && beta1 < 1.0, "AdamConfig: beta1 must be in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "AdamConfig: beta2 must be in [0, 1)");
  require(eps >= 0.0, "AdamConfig: eps must be >= 0");
}

Adam::Adam(AdamConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Adam::step(ParamMap& params,
                const std::function<double(const std::string&)>& lr_of) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto& [name, tensor] : params) {
    const double lr = lr_of(name);
    auto& m = m_[name];
    auto& v = v_[name];
    const size_t n = tensor.values().size();
    if (m.size() != n) m.assign(n, 0.0);
    if (v.size() != n) v.assign(n, 0.0);

    const std::vector<double> g = tensor.grad();
    for (size_t i = 0; i < n; ++i) {
      require(std::isfinite(g[i]), "adam_step: non-finite gradient for parameter '",
              name, "'");
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
    }
    if (lr == 0.0) continue;
    auto& theta = tensor.mutable_values();
    for (size_t i = 0; i < n; ++i) {
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

void Adam::step(ParamMap& params, double lr) {
  step(params, [lr](const std::string&) { return lr; });
}

}  // namespace voxc
