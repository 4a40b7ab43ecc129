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

#include "voxc/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "voxc/error.hpp"

namespace voxc {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'V', 'X', 'C', 'P'};
constexpr uint8_t kVersion = 1;

void write_u32le(std::ostream& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>(v >> (8 * i) & 0xff));
}

void write_u64le(std::ostream& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>(v >> (8 * i) & 0xff));
}

void write_f64le(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64le(out, bits);
}

uint8_t read_u8(std::istream& in, const std::string& path) {
  const int c = in.get();
  require(c != EOF, "load_checkpoint: '", path, "': truncated file");
  return static_cast<uint8_t>(c);
}

uint32_t read_u32le(std::istream& in, const std::string& path) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(read_u8(in, path)) << (8 * i);
  return v;
}

uint64_t read_u64le(std::istream& in, const std::string& path) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(read_u8(in, path)) << (8 * i);
  return v;
}

double read_f64le(std::istream& in, const std::string& path) {
  const uint64_t bits = read_u64le(in, path);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "save_checkpoint: cannot open '", path, "'");

  out.write(kMagic, 4);
  out.put(static_cast<char>(kVersion));

  const json meta = {
      {"config", json::parse(config_to_json(ckpt.config))},
      {"pretrain_steps", ckpt.pretrain_steps},
      {"finetune_steps", ckpt.finetune_steps},
  };
  const std::string meta_text = meta.dump();
  write_u64le(out, meta_text.size());
  out.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));

  write_u64le(out, ckpt.params.size());
  for (const auto& [name, tensor] : ckpt.params) {  // sorted by name
    write_u32le(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& shape = tensor.shape();
    write_u32le(out, static_cast<uint32_t>(shape.size()));
    for (const int64_t d : shape) write_u64le(out, static_cast<uint64_t>(d));
    for (const double v : tensor.values()) write_f64le(out, v);
  }
  out.close();
  require(out.good(), "save_checkpoint: write failed for '", path, "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_checkpoint: cannot open '", path, "'");

  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, kMagic, 4) == 0, "load_checkpoint: '", path,
          "': bad magic");
  const uint8_t version = read_u8(in, path);
  require(version == kVersion, "load_checkpoint: '", path, "': unsupported version ",
          static_cast<int>(version));

  const uint64_t meta_len = read_u64le(in, path);
  std::string meta_text(meta_len, '\0');
  in.read(meta_text.data(), static_cast<std::streamsize>(meta_len));
  require(in.good(), "load_checkpoint: '", path, "': truncated config block");

  Checkpoint ckpt;
  try {
    const json meta = json::parse(meta_text);
    ckpt.config = parse_config_json(meta.at("config").dump());
    ckpt.pretrain_steps = meta.at("pretrain_steps").get<int64_t>();
    ckpt.finetune_steps = meta.at("finetune_steps").get<int64_t>();
  } catch (const json::exception& e) {
    fail("load_checkpoint: '", path, "': bad config block: ", e.what());
  }

  const uint64_t n_params = read_u64le(in, path);
  for (uint64_t i = 0; i < n_params; ++i) {
    const uint32_t name_len = read_u32le(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    require(in.good(), "load_checkpoint: '", path, "': truncated parameter name");
    const uint32_t rank = read_u32le(in, path);
    require(rank >= 1 && rank <= 4, "load_checkpoint: '", path,
            "': implausible rank ", rank, " for '", name, "'");
    std::vector<int64_t> shape(rank);
    for (auto& d : shape) d = static_cast<int64_t>(read_u64le(in, path));
    const int64_t n = numel(shape);
    std::vector<double> values(static_cast<size_t>(n));
    for (auto& v : values) v = read_f64le(in, path);
    require(ckpt.params
                .emplace(std::move(name),
                         Tensor::from_values(std::move(shape), std::move(values), true))
                .second,
            "load_checkpoint: '", path, "': duplicate parameter record");
  }
  return ckpt;
}

Model checkpoint_model(const Checkpoint& ckpt) {
  return Model(ckpt.config.model, ckpt.params);
}

uint64_t file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "file_fingerprint: cannot open '", path, "'");
  uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (in.eof()) break;
  }
  return h;
}

std::string fingerprint_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
  return std::string(buf);
}

}  // namespace voxc
