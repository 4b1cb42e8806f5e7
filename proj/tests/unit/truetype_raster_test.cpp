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

#include <numeric>

#include "glyphforge/error.hpp"
#include "glyphforge/rasterizer.hpp"
#include "glyphforge/truetype.hpp"
#include "test_support.hpp"

namespace glyphforge {
namespace {

using testing::FontPath;

TEST(FontTest, MissingFileIsFontNotFound) {
  try {
    Font::FromFile("/nonexistent/font.ttf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFontNotFound);
    EXPECT_NE(std::string(e.what()).find("font not found"), std::string::npos);
  }
}

TEST(FontTest, GarbageIsFontInvalid) {
  try {
    Font::FromBytes(std::vector<std::uint8_t>(64, 0xAB));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFontInvalid);
  }
}

TEST(FontTest, TruncatedIsFontInvalid) {
  const Font font = Font::FromFile(FontPath("NotoSansSC-Subset.ttf"));
  std::vector<std::uint8_t> head(font.bytes().begin(), font.bytes().begin() + 200);
  EXPECT_THROW(Font::FromBytes(head), Error);
}

TEST(FontTest, MapsCommonCharacters) {
  for (const char* file : {"NotoSansSC-Subset.ttf", "NotoSerifSC-Subset.ttf", "MaShanZheng-Subset.ttf",
                           "ZCOOLKuaiLe-Subset.ttf", "ZCOOLQingKeHuangYou-Subset.ttf"}) {
    const Font font = Font::FromFile(FontPath(file));
    EXPECT_GT(font.units_per_em(), 0) << file;
    EXPECT_TRUE(font.HasGlyph(U'永')) << file;
    EXPECT_TRUE(font.HasGlyph(U'和')) << file;
    EXPECT_FALSE(font.HasGlyph(U'\U00020000')) << file;
    const Outline outline = font.LoadOutline(*font.GlyphIndex(U'永'));
    EXPECT_FALSE(outline.contours.empty()) << file;
  }
}

TEST(RasterizerTest, AxisAlignedSquareHasExactArea) {
  CoverageRasterizer r(8, 8);
  // 2.5 x 3 box, clockwise in y-down coordinates.
  r.AddLine(1.25, 2, 3.75, 2);
  r.AddLine(3.75, 2, 3.75, 5);
  r.AddLine(3.75, 5, 1.25, 5);
  r.AddLine(1.25, 5, 1.25, 2);
  const auto cov = r.Finish();
  EXPECT_NEAR(std::accumulate(cov.begin(), cov.end(), 0.0), 7.5, 1e-5);
  EXPECT_FLOAT_EQ(cov[3 * 8 + 2], 1.0f);
  EXPECT_FLOAT_EQ(cov[3 * 8 + 1], 0.75f);
  EXPECT_FLOAT_EQ(cov[3 * 8 + 3], 0.75f);
  EXPECT_FLOAT_EQ(cov[1 * 8 + 2], 0.0f);
}

TEST(RasterizerTest, TriangleAreaAndOrientationIndependence) {
  auto area = [](bool reverse) {
    CoverageRasterizer r(16, 16);
    const double p[3][2] = {{2, 2}, {14, 3}, {6, 13}};
    for (int i = 0; i < 3; ++i) {
      const int a = reverse ? (3 - i) % 3 : i;
      const int b = reverse ? (2 - i + 3) % 3 : (i + 1) % 3;
      r.AddLine(p[a][0], p[a][1], p[b][0], p[b][1]);
    }
    const auto cov = r.Finish();
    return std::accumulate(cov.begin(), cov.end(), 0.0);
  };
  // Shoelace: |(14-2)(13-2) - (6-2)(3-2)| / 2 = 64.
  EXPECT_NEAR(area(false), 64.0, 1e-4);
  EXPECT_NEAR(area(true), 64.0, 1e-4);
}

TEST(RasterizerTest, QuadraticApproachesAnalyticArea) {
  // Region between the chord y=2 and the parabola through (2,2),(14,2) with
  // control (8,14): area = 2/3 * base * height_of_curve = 2/3 * 12 * 6 = 48.
  CoverageRasterizer r(16, 16);
  r.AddQuadratic(2, 2, 8, 14, 14, 2);
  r.AddLine(14, 2, 2, 2);
  const auto cov = r.Finish();
  // Flattening keeps chords within 0.1 px of the curve, so the polygon loses
  // at most 2/3 * 12 * 0.1 = 0.8 px of area, always from the inside.
  const double total = std::accumulate(cov.begin(), cov.end(), 0.0);
  EXPECT_LE(total, 48.0 + 1e-4);
  EXPECT_GE(total, 48.0 - 0.8);
}

}  // namespace
}  // namespace glyphforge
