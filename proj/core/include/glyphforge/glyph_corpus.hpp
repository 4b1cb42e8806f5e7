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

// Font ingestion and paired glyph datasets: charset parsing, glyph
// rasterization, deterministic dataset assembly, container I/O and the
// by-codepoint train/val split.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/truetype.hpp"

namespace glyphforge {

inline constexpr double kDefaultMarginFraction = 0.1;

// style_id carried by source-font glyphs; target styles are 0..K-1.
inline constexpr int kSourceStyleId = -1;

// One rasterized character. Pixels are row-major, 1 = ink, 0 = background.
struct GlyphBitmap {
  char32_t codepoint = 0;
  int style_id = 0;
  int size = 0;
  std::vector<float> pixels;
};

struct SamplePair {
  GlyphBitmap source;
  GlyphBitmap target;
  int style_id = 0;
};

struct StyleEntry {
  int style_id = 0;
  std::string name;
  std::string font_source;
};

// Ordered target styles. Ids are exactly 0..K-1 and names are unique.
class StyleCatalog {
 public:
  StyleCatalog() = default;
  explicit StyleCatalog(std::vector<StyleEntry> entries);

  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<StyleEntry>& entries() const { return entries_; }
  const StyleEntry& at(int style_id) const;
  // Throws Error(kStyleUnknown).
  int IdForName(std::string_view name) const;

 private:
  std::vector<StyleEntry> entries_;
};

// Service/CLI side-car: the catalog plus the source font and margin needed
// to rasterize inputs the same way the training data was built.
struct CatalogFile {
  std::string source_name;
  std::string source_path;
  double margin_fraction = kDefaultMarginFraction;
  StyleCatalog catalog;
};

CatalogFile ReadCatalogFile(const std::filesystem::path& path);
void WriteCatalogFile(const std::filesystem::path& path, const CatalogFile& file);

// charset specs: "builtin:topN", "U+4E00..U+4E03" (optionally "range:"-
// prefixed), or "file:PATH" / an existing PATH holding characters or U+XXXX
// tokens. Result is sorted ascending and duplicate-free.
std::vector<char32_t> LoadCharset(std::string_view spec);

// The embedded frequency-ordered list of common characters.
const std::vector<char32_t>& BuiltinCharset();

GlyphBitmap RasterizeGlyph(const Font& font, char32_t codepoint, int size,
                           double margin_fraction = kDefaultMarginFraction, int style_id = 0);

struct FontRef {
  std::string name;
  std::string path;
  std::string content_hash;  // filled in by BuildDataset
};

struct DatasetManifest {
  FontRef source_font;
  std::vector<FontRef> target_fonts;
  std::vector<char32_t> charset;
  int size = 0;
  double margin_fraction = kDefaultMarginFraction;
  std::uint64_t split_seed = 0;
  std::string content_hash;
};

struct SkipEntry {
  char32_t codepoint = 0;
  int style_id = 0;
  std::string reason;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<SamplePair> samples;  // ordered by (codepoint, style_id)
  std::vector<SkipEntry> skipped;

  StyleCatalog Catalog() const;
};

struct BuildOptions {
  int size = 64;
  double margin_fraction = kDefaultMarginFraction;
  std::uint64_t split_seed = 0;
  int workers = 1;
};

Dataset BuildDataset(const FontRef& source, const std::vector<FontRef>& targets,
                     const std::vector<char32_t>& charset, const BuildOptions& options);

// Same as above with already-loaded fonts; the refs supply names/paths.
Dataset BuildDataset(const FontRef& source_ref, const Font& source,
                     const std::vector<FontRef>& target_refs, const std::vector<Font>& targets,
                     const std::vector<char32_t>& charset, const BuildOptions& options);

// Container: canonical manifest text, then 8-bit samples in stored order.
std::vector<std::uint8_t> SerializeDataset(const Dataset& dataset);
Dataset DeserializeDataset(std::span<const std::uint8_t> bytes);
void SaveDataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset LoadDataset(const std::filesystem::path& path);

// Lines of "U+XXXX<TAB>style_id<TAB>reason".
void WriteSkipReport(std::ostream& out, const std::vector<SkipEntry>& skipped);

struct DatasetSplit {
  std::vector<SamplePair> train;
  std::vector<SamplePair> val;
};

// Holds out whole codepoints; deterministic in seed.
DatasetSplit SplitDataset(const Dataset& dataset, double val_fraction, std::uint64_t seed);

// Pixel quantization used by the container.
inline std::uint8_t QuantizePixel(float v) {
  const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  return static_cast<std::uint8_t>(c * 255.0f + 0.5f);
}
inline float DequantizePixel(std::uint8_t q) { return static_cast<float>(q) / 255.0f; }

}  // namespace glyphforge
