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

#ifndef VOXC_TESTS_TEST_UTIL_HPP_
#define VOXC_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "voxc/tensor.hpp"

namespace voxc::testutil {

// Plain LCG (MINSTD), intentionally unrelated to voxc::Rng so oracle
// implementations do not share randomness machinery with the code under test.
class OracleRng {
 public:
  explicit OracleRng(uint32_t seed) : state_(seed == 0 ? 1 : seed) {}

  uint32_t next() {
    state_ = static_cast<uint32_t>((static_cast<uint64_t>(state_) * 48271u) % 2147483647u);
    return state_;
  }

  double uniform() { return static_cast<double>(next()) / 2147483647.0; }

  int64_t below(int64_t n) { return static_cast<int64_t>(next() % static_cast<uint32_t>(n)); }

 private:
  uint32_t state_;
};

// Max relative error (unit floor) between the analytic gradients of `params`
// and central finite differences of `forward`. `forward` must rebuild the
// graph from the current parameter values on every call.
inline double fd_max_rel_err(const std::function<double()>& forward,
                             std::vector<Tensor> params,
                             const std::function<Tensor()>& loss_builder) {
  // analytic pass
  for (auto& p : params) p.zero_grad();
  const Tensor loss = loss_builder();
  backward(loss);
  double worst = 0.0;
  for (auto& p : params) {
    const std::vector<double> analytic = p.grad();
    auto& theta = p.mutable_values();
    for (size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      const double h = 1e-4 * (1.0 + std::abs(saved));
      theta[i] = saved + h;
      const double up = forward();
      theta[i] = saved - h;
      const double down = forward();
      theta[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
  }
  return worst;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("voxc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace voxc::testutil

#endif  // VOXC_TESTS_TEST_UTIL_HPP_
