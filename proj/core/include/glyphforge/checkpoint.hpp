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

#pragma once

// Checkpoint container:
//
//   "GLYPHFCK"                       8-byte magic
//   u32 LE format version
//   u64 LE header length, header    JSON: model config with architecture
//                                    metadata, phase, step, array table
//   per array: u64 LE byte length, float32 LE values, in layout order
//   "sha256:" + 64 hex digits        over every preceding byte
//
// Loading rejects any declared array whose name or shape disagrees with the
// layout derived from the stored config.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/style_unet.hpp"

namespace glyphforge {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  Parameters params;
  int phase = 0;
  std::int64_t step = 0;
  std::string content_hash;  // set by Serialize/Load

  const ModelConfig& config() const { return params.config(); }
};

std::vector<std::uint8_t> SerializeCheckpoint(Checkpoint& checkpoint);
Checkpoint DeserializeCheckpoint(std::span<const std::uint8_t> bytes);

// Writes through a temporary file and renames, so a crash never leaves a
// partially written checkpoint under the final name.
void SaveCheckpoint(const std::filesystem::path& path, Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

std::string CheckpointFileName(int phase, std::int64_t step);

}  // namespace glyphforge
