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

#ifndef VOXC_CLI_HPP_
#define VOXC_CLI_HPP_

namespace voxc {

// Subcommands: synth, pretrain, finetune, lm-train, decode, eval, enroll,
// identify. Results go to stdout, diagnostics to stderr. Exit codes:
// 0 success, 1 runtime error, 2 usage error. The VOXC_SEED environment
// variable overrides the config seed (an explicit --seed flag wins over
// both).
int run_cli(int argc, const char* const* argv);

}  // namespace voxc

#endif  // VOXC_CLI_HPP_
