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

#include <gtest/gtest.h>

#include <cstring>
#include <functional>

#include <nlohmann/json.hpp>

#include "glyphforge/checkpoint.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/hash.hpp"
#include "test_support.hpp"

namespace glyphforge {
namespace {

Checkpoint Tiny() {
  ModelConfig c;
  c.input_size = 8;
  c.depth = 2;
  c.base_channels = 4;
  c.style_count = 2;
  Checkpoint ckpt;
  ckpt.params = InitModel(c);
  ckpt.phase = 2;
  ckpt.step = 17;
  return ckpt;
}

std::uint64_t ReadU64(const std::vector<std::uint8_t>& b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

// Rewrites the JSON header and re-seals the content hash, so only the
// semantic checks can reject the result.
std::vector<std::uint8_t> EditHeader(const std::vector<std::uint8_t>& bytes,
                                     const std::function<void(nlohmann::json&)>& edit) {
  const std::uint64_t len = ReadU64(bytes, 12);
  nlohmann::json header = nlohmann::json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<long>(len));
  edit(header);
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(bytes.begin(), bytes.begin() + 12);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(text.size() >> (8 * i)));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), bytes.begin() + 20 + static_cast<long>(len), bytes.end() - 71);
  const std::string hash = "sha256:" + Sha256Hex(out);
  out.insert(out.end(), hash.begin(), hash.end());
  return out;
}

ErrorCode CodeOf(const std::vector<std::uint8_t>& bytes) {
  try {
    DeserializeCheckpoint(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(CheckpointTest, RoundTripIsExact) {
  Checkpoint a = Tiny();
  const auto bytes = SerializeCheckpoint(a);
  EXPECT_EQ(a.content_hash.size(), 64u);
  const Checkpoint b = DeserializeCheckpoint(bytes);
  EXPECT_TRUE(b.params == a.params);
  EXPECT_EQ(b.phase, 2);
  EXPECT_EQ(b.step, 17);
  EXPECT_EQ(b.content_hash, a.content_hash);
  EXPECT_EQ(std::memcmp(bytes.data(), "GLYPHFCK", 8), 0);
  const std::string tail(bytes.end() - 71, bytes.end());
  EXPECT_EQ(tail, "sha256:" + a.content_hash);
}

TEST(CheckpointTest, HeaderCarriesArchitecture) {
  Checkpoint a = Tiny();
  const auto bytes = SerializeCheckpoint(a);
  const std::uint64_t len = ReadU64(bytes, 12);
  const auto header = nlohmann::json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<long>(len));
  EXPECT_EQ(header["model"]["kernel_size"], 4);
  EXPECT_EQ(header["arrays"][0]["name"], "enc0.weight");
  EXPECT_EQ(header["arrays"][0]["shape"], nlohmann::json({4, 1, 4, 4}));
  // First array's length prefix follows the header.
  EXPECT_EQ(ReadU64(bytes, 20 + len), 4u * 1 * 4 * 4 * 4);
}

TEST(CheckpointTest, FileRoundTripAndName) {
  testing::TempDir dir;
  Checkpoint a = Tiny();
  const auto path = dir / CheckpointFileName(2, 17);
  SaveCheckpoint(path, a);
  EXPECT_EQ(path.filename(), "ckpt_phase2_step17");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  const Checkpoint b = LoadCheckpoint(path);
  EXPECT_TRUE(b.params == a.params);
  EXPECT_EQ(b.content_hash, a.content_hash);
}

TEST(CheckpointTest, CorruptionIsRejected) {
  Checkpoint a = Tiny();
  const auto bytes = SerializeCheckpoint(a);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  EXPECT_EQ(CodeOf(flipped), ErrorCode::kCheckpointInvalid);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(CodeOf(magic), ErrorCode::kCheckpointInvalid);
  EXPECT_EQ(CodeOf(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 50)), ErrorCode::kCheckpointInvalid);
}

TEST(CheckpointTest, DeclaredShapesAreValidated) {
  Checkpoint a = Tiny();
  const auto bytes = SerializeCheckpoint(a);
  EXPECT_NO_THROW(DeserializeCheckpoint(EditHeader(bytes, [](nlohmann::json&) {})));
  EXPECT_EQ(CodeOf(EditHeader(bytes, [](nlohmann::json& h) { h["arrays"][1]["shape"] = {5}; })),
            ErrorCode::kCheckpointInvalid);
  EXPECT_EQ(CodeOf(EditHeader(bytes, [](nlohmann::json& h) { h["arrays"][0]["name"] = "dec0.weight"; })),
            ErrorCode::kCheckpointInvalid);
  EXPECT_EQ(CodeOf(EditHeader(bytes, [](nlohmann::json& h) { h["model"]["base_channels"] = 8; })),
            ErrorCode::kCheckpointInvalid);
  EXPECT_EQ(CodeOf(EditHeader(bytes, [](nlohmann::json& h) { h["model"]["depth"] = 9; })),
            ErrorCode::kCheckpointInvalid);
  EXPECT_EQ(CodeOf(EditHeader(bytes, [](nlohmann::json& h) { h["dtype"] = "float16"; })),
            ErrorCode::kCheckpointInvalid);
}

TEST(CheckpointTest, MissingFile) {
  EXPECT_THROW(LoadCheckpoint("/nonexistent/ckpt"), Error);
}

}  // namespace
}  // namespace glyphforge
