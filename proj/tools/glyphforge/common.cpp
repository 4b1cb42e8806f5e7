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

#include <fstream>

#include "commands.hpp"
#include "glyphforge/error.hpp"

namespace glyphforge::cli {

CLI::Validator PowerOfTwo() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        int n = 0;
        try {
          n = std::stoi(value);
        } catch (const std::exception&) {
          return "not an integer: " + value;
        }
        if (n < 8 || n > 1024 || (n & (n - 1)) != 0) return "must be a power of two in [8, 1024]: " + value;
        return {};
      },
      "POW2");
}

FontRef ParseFontArg(const std::string& arg) {
  FontRef ref;
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0) {
    ref.name = arg.substr(0, eq);
    ref.path = arg.substr(eq + 1);
  } else {
    ref.path = arg;
    ref.name = std::filesystem::path(arg).stem().string();
  }
  return ref;
}

StyleWeights ParseStyleArg(const std::string& arg, const StyleCatalog& catalog) {
  const auto first = arg.find_first_not_of(" \t");
  if (first != std::string::npos && arg[first] == '[') return ParseWeightVector(arg, catalog.size());
  return Mix(ParseMixSpec(arg), catalog);
}

Generator LoadGenerator(const std::string& checkpoint_path, const CatalogFile& catalog) {
  Checkpoint checkpoint = LoadCheckpoint(checkpoint_path);
  if (checkpoint.config().style_count != catalog.catalog.size()) {
    throw Error(ErrorCode::kStyleDimMismatch, "checkpoint K=" + std::to_string(checkpoint.config().style_count) +
                                                  " but catalog lists " + std::to_string(catalog.catalog.size()) +
                                                  " styles");
  }
  return Generator(std::move(checkpoint), Font::FromFile(catalog.source_path), catalog.margin_fraction);
}

void WriteFile(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write: " + path.string());
}

}  // namespace glyphforge::cli
