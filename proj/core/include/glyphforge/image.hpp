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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glyphforge {

// 8-bit grayscale raster, row-major. 255 is white paper, 0 is full ink.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Ink intensities in [0,1] (1 = ink) to dark-on-light 8-bit pixels.
GrayImage InkToImage(std::span<const float> ink, int size);

std::vector<std::uint8_t> EncodePng(const GrayImage& image);
GrayImage DecodePng(std::span<const std::uint8_t> png);
void WritePng(const std::filesystem::path& path, const GrayImage& image);

std::string Base64Encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> Base64Decode(std::string_view text);

// Built-in 5x7 label font; lowercase maps to capitals, unknown glyphs to '?'.
inline constexpr int kLabelAdvance = 6;
inline constexpr int kLabelLineHeight = 8;
void DrawLabel(GrayImage& image, int x, int y, std::string_view text, std::uint8_t ink = 0);

void DrawRect(GrayImage& image, int x0, int y0, int x1, int y1, std::uint8_t ink = 0);
void DrawLine(GrayImage& image, int x0, int y0, int x1, int y1, std::uint8_t ink = 0);
void Blit(GrayImage& dst, const GrayImage& src, int x, int y);

}  // namespace glyphforge
