// Copyright 2026 The GlyphForge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glyphforge/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "glyphforge/error.hpp"
#include "glyphforge/hash.hpp"

namespace glyphforge {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'G', 'L', 'Y', 'P', 'H', 'F', 'C', 'K'};
constexpr std::string_view kHashPrefix = "sha256:";
constexpr std::size_t kHashTrailer = 7 + 64;

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}
void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}
std::uint64_t GetLE(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int k = 0; k < bytes; ++k) v |= std::uint64_t{in[at + k]} << (8 * k);
  return v;
}

[[noreturn]] void Invalid(const std::string& why) {
  throw Error(ErrorCode::kCheckpointInvalid, "checkpoint: " + why);
}

json ConfigToJson(const ModelConfig& c) {
  return json{{"input_size", c.input_size},
              {"depth", c.depth},
              {"base_channels", c.base_channels},
              {"channel_cap", c.channel_cap},
              {"style_count", c.style_count},
              {"seed", c.seed},
              {"kernel_size", c.kernel_size},
              {"stride", 2},
              {"padding", 1},
              {"downsample", "conv"},
              {"upsample", "transposed_conv"},
              {"normalization", "instance_affine"},
              {"norm_epsilon", c.norm_epsilon},
              {"encoder_activation", "leaky_relu"},
              {"leaky_slope", c.leaky_slope},
              {"decoder_activation", "relu"},
              {"output_activation", "sigmoid"},
              {"style_injection", "bottleneck_concat"}};
}

ModelConfig ConfigFromJson(const json& j) {
  ModelConfig c;
  c.input_size = j.at("input_size").get<int>();
  c.depth = j.at("depth").get<int>();
  c.base_channels = j.at("base_channels").get<int>();
  c.channel_cap = j.at("channel_cap").get<int>();
  c.style_count = j.at("style_count").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.kernel_size = j.at("kernel_size").get<int>();
  c.norm_epsilon = j.at("norm_epsilon").get<double>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  // Everything else is fixed by this implementation; refuse anything else.
  const json expected = ConfigToJson(c);
  for (const auto& [key, value] : expected.items()) {
    if (!j.contains(key) || j.at(key) != value) Invalid("unsupported architecture field '" + key + "'");
  }
  return c;
}

}  // namespace

std::string CheckpointFileName(int phase, std::int64_t step) {
  return "ckpt_phase" + std::to_string(phase) + "_step" + std::to_string(step);
}

std::vector<std::uint8_t> SerializeCheckpoint(Checkpoint& ckpt) {
  const ParameterLayout& layout = ckpt.params.layout();
  json arrays = json::array();
  for (const ParamSpec& s : layout.arrays()) arrays.push_back({{"name", s.name}, {"shape", s.shape}});
  const json header{{"format", "glyphforge-checkpoint"},
                    {"model", ConfigToJson(ckpt.config())},
                    {"phase", ckpt.phase},
                    {"step", ckpt.step},
                    {"dtype", "float32_le"},
                    {"arrays", arrays}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  PutU32(out, kCheckpointFormatVersion);
  PutU64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const ParamSpec& s : layout.arrays()) {
    PutU64(out, s.count * 4);
    for (std::size_t i = 0; i < s.count; ++i) {
      PutU32(out, std::bit_cast<std::uint32_t>(ckpt.params.values()[s.offset + i]));
    }
  }
  ckpt.content_hash = Sha256Hex(out);
  out.insert(out.end(), kHashPrefix.begin(), kHashPrefix.end());
  out.insert(out.end(), ckpt.content_hash.begin(), ckpt.content_hash.end());
  return out;
}

Checkpoint DeserializeCheckpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20 + kHashTrailer || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    Invalid("bad magic");
  }
  const std::size_t body = bytes.size() - kHashTrailer;
  const std::string trailer(reinterpret_cast<const char*>(bytes.data()) + body, kHashTrailer);
  if (!trailer.starts_with(kHashPrefix)) Invalid("missing content hash");
  const std::string stored = trailer.substr(kHashPrefix.size());
  if (Sha256Hex(bytes.first(body)) != stored) Invalid("content hash mismatch");

  if (GetLE(bytes, 8, 4) != kCheckpointFormatVersion) Invalid("unsupported format version");
  const std::uint64_t header_len = GetLE(bytes, 12, 8);
  if (20 + header_len > body) Invalid("truncated header");
  json header;
  try {
    header = json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const json::exception& e) {
    Invalid(std::string("header: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    const ModelConfig config = ConfigFromJson(header.at("model"));
    config.Validate();
    ckpt.params = Parameters(config);
    ckpt.phase = header.at("phase").get<int>();
    ckpt.step = header.at("step").get<std::int64_t>();
    if (header.at("dtype") != "float32_le") Invalid("unsupported dtype");
    const json& arrays = header.at("arrays");
    const auto& specs = ckpt.params.layout().arrays();
    if (arrays.size() != specs.size()) Invalid("array count does not match model config");
    std::size_t at = 20 + header_len;
    for (std::size_t a = 0; a < specs.size(); ++a) {
      const ParamSpec& s = specs[a];
      if (arrays[a].at("name") != s.name || arrays[a].at("shape").get<std::vector<int>>() != s.shape) {
        Invalid("array " + std::to_string(a) + " declared as " + arrays[a].dump() +
                " but config requires " + s.name);
      }
      if (at + 8 > body || GetLE(bytes, at, 8) != s.count * 4) Invalid("bad length prefix for " + s.name);
      at += 8;
      if (at + s.count * 4 > body) Invalid("truncated array " + s.name);
      for (std::size_t i = 0; i < s.count; ++i) {
        ckpt.params.values()[s.offset + i] =
            std::bit_cast<float>(static_cast<std::uint32_t>(GetLE(bytes, at + 4 * i, 4)));
      }
      at += s.count * 4;
    }
    if (at != body) Invalid("trailing bytes after arrays");
  } catch (const json::exception& e) {
    Invalid(std::string("header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCheckpointInvalid) throw;
    Invalid(e.what());
  }
  ckpt.content_hash = stored;
  return ckpt;
}

void SaveCheckpoint(const std::filesystem::path& path, Checkpoint& checkpoint) {
  const auto bytes = SerializeCheckpoint(checkpoint);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write checkpoint: " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read checkpoint: " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return DeserializeCheckpoint(bytes);
}

}  // namespace glyphforge
