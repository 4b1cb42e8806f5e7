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

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "glyphforge/glyph_corpus.hpp"
#include "glyphforge/style_mixer.hpp"

namespace glyphforge::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Each Register* attaches a subcommand and stores its action in `actions`.
using Action = std::function<int()>;
struct Registry {
  CLI::App& app;
  std::vector<std::pair<CLI::App*, Action>> actions;
};

void RegisterDataset(Registry& registry);
void RegisterTrain(Registry& registry);
void RegisterEval(Registry& registry);
void RegisterGenerate(Registry& registry);
void RegisterGradcheck(Registry& registry);
void RegisterServe(Registry& registry);

// Shared helpers.
CLI::Validator PowerOfTwo();
// "[name=]PATH"; the name defaults to the file stem.
FontRef ParseFontArg(const std::string& arg);
// A mix spec "name=w,..." or a bracketed vector "[w0,w1,...]".
StyleWeights ParseStyleArg(const std::string& arg, const StyleCatalog& catalog);
Generator LoadGenerator(const std::string& checkpoint_path, const CatalogFile& catalog);
void WriteFile(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace glyphforge::cli
