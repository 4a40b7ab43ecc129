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

#ifndef VOXC_OPTIM_HPP_
#define VOXC_OPTIM_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "voxc/model.hpp"

namespace voxc {

// Warmup / hold / linear-decay learning-rate schedule. The three phase
// fractions must sum to 1.
struct TriStateSchedule {
  int64_t total_updates = 1;
  double peak_lr = 5e-4;
  double warmup_frac = 0.10;
  double constant_frac = 0.40;
  double decay_frac = 0.50;

  void validate() const;
};

// Linear 0 -> peak over the warmup phase, peak through the hold phase, then
// linear peak -> 0; continuous at both breakpoints. step must lie in
// [0, total_updates].
double lr_at(const TriStateSchedule& sched, int64_t step);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-6;

  void validate() const;
};

// Standard bias-corrected Adam over a named parameter map. Moment buffers are
// keyed by parameter name and created on first update.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {});

  // One update with a per-parameter learning rate (lr 0 leaves a parameter
  // untouched). A non-finite gradient aborts naming the parameter.
  void step(ParamMap& params, const std::function<double(const std::string&)>& lr_of);
  void step(ParamMap& params, double lr);

  int64_t steps_done() const { return t_; }

 private:
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::map<std::string, std::vector<double>> m_, v_;
};

}  // namespace voxc

#endif  // VOXC_OPTIM_HPP_
