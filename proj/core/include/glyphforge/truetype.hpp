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

// Minimal TrueType (glyf outline) reader: table directory, cmap formats 4
// and 12, loca/glyf with simple and composite glyphs. Hinting and CFF
// outlines are not supported.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace glyphforge {

struct OutlinePoint {
  double x = 0.0;
  double y = 0.0;
  bool on_curve = true;
};

using Contour = std::vector<OutlinePoint>;

// Glyph outline in font units, y pointing up.
struct Outline {
  std::vector<Contour> contours;
};

class Font {
 public:
  static Font FromFile(const std::filesystem::path& path);
  static Font FromBytes(std::vector<std::uint8_t> bytes, std::string origin = "<memory>");

  // Glyph id for a codepoint, or nullopt when the font maps it to .notdef.
  std::optional<std::uint32_t> GlyphIndex(char32_t codepoint) const;
  bool HasGlyph(char32_t codepoint) const { return GlyphIndex(codepoint).has_value(); }

  Outline LoadOutline(std::uint32_t glyph_index) const;

  int units_per_em() const { return units_per_em_; }
  std::uint32_t glyph_count() const { return glyph_count_; }
  std::span<const std::uint8_t> bytes() const { return bytes_; }
  const std::string& origin() const { return origin_; }

 private:
  Font() = default;

  void LoadOutlineInto(std::uint32_t glyph_index, const double transform[6], int recursion,
                       Outline& out) const;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> GlyphRange(
      std::uint32_t glyph_index) const;

  std::vector<std::uint8_t> bytes_;
  std::string origin_;
  std::uint32_t glyf_offset_ = 0;
  std::uint32_t glyf_length_ = 0;
  std::uint32_t loca_offset_ = 0;
  std::uint32_t cmap_subtable_ = 0;
  std::uint16_t cmap_format_ = 0;
  std::uint32_t glyph_count_ = 0;
  int units_per_em_ = 0;
  bool long_loca_ = false;
};

}  // namespace glyphforge
