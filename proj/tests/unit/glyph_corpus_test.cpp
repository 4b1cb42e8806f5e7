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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "glyphforge/error.hpp"
#include "glyphforge/glyph_corpus.hpp"
#include "test_support.hpp"

namespace glyphforge {
namespace {

using testing::FontPath;
using testing::SourceFont;
using testing::TargetFonts;
using testing::TempDir;

template <typename Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no glyphforge::Error thrown";
  return ErrorCode::kIoError;
}

TEST(CharsetTest, BuiltinIsLargeAndUnique) {
  const auto& all = BuiltinCharset();
  EXPECT_GE(all.size(), 500u);
  EXPECT_EQ(std::set<char32_t>(all.begin(), all.end()).size(), all.size());
}

TEST(CharsetTest, BuiltinTopNSortedUnique) {
  const auto cps = LoadCharset("builtin:top4");
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_TRUE(std::is_sorted(cps.begin(), cps.end()));
  EXPECT_EQ(std::adjacent_find(cps.begin(), cps.end()), cps.end());
  std::set<char32_t> expected(BuiltinCharset().begin(), BuiltinCharset().begin() + 4);
  EXPECT_EQ(std::set<char32_t>(cps.begin(), cps.end()), expected);
}

TEST(CharsetTest, InclusiveRange) {
  EXPECT_EQ(LoadCharset("U+4E00..U+4E03"), (std::vector<char32_t>{0x4E00, 0x4E01, 0x4E02, 0x4E03}));
  EXPECT_EQ(LoadCharset("range:U+4E00..U+4E00"), (std::vector<char32_t>{0x4E00}));
}

TEST(CharsetTest, FileDeduplicatesAndSorts) {
  TempDir dir;
  const auto path = dir / "chars.txt";
  std::ofstream(path) << "永 永 和";
  EXPECT_EQ(LoadCharset(path.string()), (std::vector<char32_t>{0x548C, 0x6C38}));
  EXPECT_EQ(LoadCharset("file:" + path.string()), (std::vector<char32_t>{0x548C, 0x6C38}));
  std::ofstream(dir / "tokens.txt") << "U+6C38, 和\n";
  EXPECT_EQ(LoadCharset((dir / "tokens.txt").string()), (std::vector<char32_t>{0x548C, 0x6C38}));
}

TEST(CharsetTest, Errors) {
  TempDir dir;
  std::ofstream(dir / "empty.txt") << "  \n";
  EXPECT_EQ(CodeOf([&] { LoadCharset((dir / "empty.txt").string()); }), ErrorCode::kCharsetEmpty);
  EXPECT_EQ(CodeOf([] { LoadCharset("builtin:top0"); }), ErrorCode::kCharsetEmpty);
  EXPECT_EQ(CodeOf([] { LoadCharset("builtin:topx"); }), ErrorCode::kCharsetSpecInvalid);
  EXPECT_EQ(CodeOf([] { LoadCharset("builtin:top100000"); }), ErrorCode::kCharsetSpecInvalid);
  EXPECT_EQ(CodeOf([] { LoadCharset("U+4E03..U+4E00"); }), ErrorCode::kCharsetSpecInvalid);
  EXPECT_EQ(CodeOf([] { LoadCharset("nonsense-spec"); }), ErrorCode::kCharsetSpecInvalid);
}

TEST(RasterizeTest, ContractAndDeterminism) {
  const Font font = Font::FromFile(FontPath("NotoSerifSC-Subset.ttf"));
  const GlyphBitmap a = RasterizeGlyph(font, U'永', 64);
  ASSERT_EQ(a.size, 64);
  ASSERT_EQ(a.pixels.size(), 64u * 64u);
  EXPECT_TRUE(std::all_of(a.pixels.begin(), a.pixels.end(), [](float p) { return p >= 0.0f && p <= 1.0f; }));
  EXPECT_GT(*std::max_element(a.pixels.begin(), a.pixels.end()), 0.5f);
  const GlyphBitmap b = RasterizeGlyph(font, U'永', 64);
  EXPECT_EQ(a.pixels, b.pixels);
}

TEST(RasterizeTest, InkStaysInsideMargin) {
  const Font font = Font::FromFile(FontPath("NotoSansSC-Subset.ttf"));
  const int size = 64;
  const GlyphBitmap g = RasterizeGlyph(font, U'一', size, 0.25);
  int min_x = size, max_x = -1, min_y = size, max_y = -1;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (g.pixels[static_cast<std::size_t>(y * size + x)] > 0.0f) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    }
  }
  // 16px margin; the wide stroke spans the full inner width and sits centered.
  EXPECT_GE(min_x, 16);
  EXPECT_LE(max_x, 47);
  EXPECT_LE(std::abs((min_x + max_x) - (size - 1)), 2);
  EXPECT_LE(std::abs((min_y + max_y) - (size - 1)), 2);
  EXPECT_GE(max_x - min_x, 30);
}

TEST(RasterizeTest, ErrorPaths) {
  const Font holes = Font::FromFile(FontPath("Fixture-Holes.ttf"));
  EXPECT_EQ(CodeOf([&] { RasterizeGlyph(holes, 0x4E0D, 32); }), ErrorCode::kGlyphMissing);
  EXPECT_EQ(CodeOf([&] { RasterizeGlyph(holes, 0x3000, 32); }), ErrorCode::kGlyphBlank);
  EXPECT_EQ(CodeOf([&] { RasterizeGlyph(holes, 0x4E00, 48); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(CodeOf([&] { RasterizeGlyph(holes, 0x4E00, 4); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(CodeOf([&] { RasterizeGlyph(holes, 0x4E00, 32, 0.5); }), ErrorCode::kConfigInvalid);
}

TEST(CatalogTest, Invariants) {
  EXPECT_EQ(CodeOf([] { StyleCatalog({{0, "a", ""}, {2, "b", ""}}); }), ErrorCode::kCatalogInvalid);
  EXPECT_EQ(CodeOf([] { StyleCatalog({{0, "a", ""}, {1, "a", ""}}); }), ErrorCode::kCatalogInvalid);
  const StyleCatalog ok({{0, "song", "x"}, {1, "kai", "y"}});
  EXPECT_EQ(ok.IdForName("kai"), 1);
  EXPECT_EQ(CodeOf([&] { ok.IdForName("hei"); }), ErrorCode::kStyleUnknown);
}

TEST(CatalogTest, FileRoundTrip) {
  TempDir dir;
  CatalogFile file{"hei", "fonts/hei.ttf", 0.125, StyleCatalog({{0, "song", "s.ttf"}, {1, "kai", "k.ttf"}})};
  WriteCatalogFile(dir / "c.tsv", file);
  const CatalogFile back = ReadCatalogFile(dir / "c.tsv");
  EXPECT_EQ(back.source_name, "hei");
  EXPECT_EQ(back.source_path, "fonts/hei.ttf");
  EXPECT_DOUBLE_EQ(back.margin_fraction, 0.125);
  ASSERT_EQ(back.catalog.size(), 2);
  EXPECT_EQ(back.catalog.at(1).name, "kai");
  EXPECT_EQ(back.catalog.at(1).font_source, "k.ttf");
}

TEST(DatasetTest, FourByTwoOrdered) {
  const Dataset ds = testing::SmallDataset(2);
  ASSERT_EQ(ds.samples.size(), 8u);
  EXPECT_TRUE(ds.skipped.empty());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const SamplePair& s = ds.samples[i];
    EXPECT_EQ(s.source.codepoint, s.target.codepoint);
    EXPECT_EQ(s.target.style_id, s.style_id);
    EXPECT_EQ(s.source.style_id, kSourceStyleId);
    EXPECT_EQ(s.style_id, static_cast<int>(i % 2));
    if (i > 0) {
      const SamplePair& p = ds.samples[i - 1];
      EXPECT_LT(std::make_pair(p.source.codepoint, p.style_id), std::make_pair(s.source.codepoint, s.style_id));
    }
    for (const auto* px : {&s.source.pixels, &s.target.pixels}) {
      EXPECT_TRUE(std::all_of(px->begin(), px->end(), [](float p) { return p >= 0.0f && p <= 1.0f; }));
    }
  }
  const StyleCatalog catalog = ds.Catalog();
  ASSERT_EQ(catalog.size(), 2);
  EXPECT_EQ(catalog.at(0).name, "song");
}

TEST(DatasetTest, MissingTargetGlyphIsSkippedAndReported) {
  std::vector<FontRef> targets = TargetFonts(1);
  targets.push_back({"holes", FontPath("Fixture-Holes.ttf"), ""});
  BuildOptions options;
  options.size = 32;
  const Dataset ds = BuildDataset(SourceFont(), targets, LoadCharset("builtin:top4"), options);
  EXPECT_EQ(ds.samples.size(), 7u);
  ASSERT_EQ(ds.skipped.size(), 1u);
  EXPECT_EQ(ds.skipped[0].codepoint, 0x4E0Du);
  EXPECT_EQ(ds.skipped[0].style_id, 1);
  std::ostringstream report;
  WriteSkipReport(report, ds.skipped);
  EXPECT_EQ(report.str(), "U+4E0D\t1\tGlyphMissing\n");
}

TEST(DatasetTest, MissingSourceGlyphSkipsEveryStyle) {
  BuildOptions options;
  options.size = 32;
  const FontRef source{"holes", FontPath("Fixture-Holes.ttf"), ""};
  const Dataset ds = BuildDataset(source, TargetFonts(2), LoadCharset("builtin:top4"), options);
  EXPECT_EQ(ds.samples.size(), 6u);
  ASSERT_EQ(ds.skipped.size(), 2u);
  for (const SkipEntry& s : ds.skipped) {
    EXPECT_EQ(s.codepoint, 0x4E0Du);
    EXPECT_EQ(s.reason, "source:GlyphMissing");
  }
}

TEST(DatasetTest, NothingUsableIsDatasetEmpty) {
  BuildOptions options;
  options.size = 32;
  const std::vector<FontRef> targets = {{"holes", FontPath("Fixture-Holes.ttf"), ""}};
  EXPECT_EQ(CodeOf([&] { BuildDataset(SourceFont(), targets, {0x4E0D}, options); }), ErrorCode::kDatasetEmpty);
  EXPECT_EQ(CodeOf([&] { BuildDataset(SourceFont(), {}, {0x4E00}, options); }), ErrorCode::kDatasetInvalid);
}

TEST(DatasetTest, DeterministicAcrossRebuildsAndWorkerCounts) {
  BuildOptions options;
  options.size = 32;
  const auto charset = LoadCharset("builtin:top24");
  const Dataset a = BuildDataset(SourceFont(), TargetFonts(3), charset, options);
  options.workers = 5;
  const Dataset b = BuildDataset(SourceFont(), TargetFonts(3), charset, options);
  EXPECT_EQ(a.manifest.content_hash, b.manifest.content_hash);
  EXPECT_EQ(SerializeDataset(a), SerializeDataset(b));
  EXPECT_EQ(a.manifest.content_hash.size(), 64u);
}

TEST(DatasetTest, ContainerRoundTripQuantizes) {
  TempDir dir;
  const Dataset a = testing::SmallDataset(2);
  SaveDataset(dir / "d.bin", a);
  const Dataset b = LoadDataset(dir / "d.bin");
  EXPECT_EQ(b.manifest.content_hash, a.manifest.content_hash);
  EXPECT_EQ(b.manifest.charset, a.manifest.charset);
  ASSERT_EQ(b.samples.size(), a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    for (std::size_t p = 0; p < a.samples[i].target.pixels.size(); ++p) {
      EXPECT_EQ(QuantizePixel(b.samples[i].target.pixels[p]), QuantizePixel(a.samples[i].target.pixels[p]));
      EXPECT_NEAR(b.samples[i].target.pixels[p], a.samples[i].target.pixels[p], 0.5f / 255.0f + 1e-6f);
    }
  }
  EXPECT_EQ(SerializeDataset(b), SerializeDataset(a));
}

TEST(DatasetTest, TamperedContainerIsRejected) {
  const Dataset a = testing::SmallDataset(1);
  std::vector<std::uint8_t> bytes = SerializeDataset(a);
  bytes[bytes.size() - 10] ^= 0x01;
  EXPECT_EQ(CodeOf([&] { DeserializeDataset(bytes); }), ErrorCode::kDatasetInvalid);
  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + 100);
  EXPECT_EQ(CodeOf([&] { DeserializeDataset(truncated); }), ErrorCode::kDatasetInvalid);
}

std::set<char32_t> Codepoints(const std::vector<SamplePair>& samples) {
  std::set<char32_t> out;
  for (const auto& s : samples) out.insert(s.source.codepoint);
  return out;
}

TEST(SplitTest, ByCodepointAndDeterministic) {
  BuildOptions options;
  options.size = 16;
  const Dataset ds = BuildDataset(SourceFont(), TargetFonts(2), LoadCharset("builtin:top10"), options);
  const DatasetSplit s = SplitDataset(ds, 0.2, 7);
  const auto train = Codepoints(s.train);
  const auto val = Codepoints(s.val);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(val.size(), 2u);
  for (char32_t cp : val) EXPECT_EQ(train.count(cp), 0u);
  EXPECT_EQ(s.train.size() + s.val.size(), ds.samples.size());

  const DatasetSplit again = SplitDataset(ds, 0.2, 7);
  EXPECT_EQ(Codepoints(again.val), val);
  EXPECT_TRUE(std::is_sorted(s.val.begin(), s.val.end(), [](const SamplePair& a, const SamplePair& b) {
    return std::make_pair(a.source.codepoint, a.style_id) < std::make_pair(b.source.codepoint, b.style_id);
  }));
}

TEST(SplitTest, BoundariesAndDegenerate) {
  const Dataset ds = testing::SmallDataset(2);
  const DatasetSplit all = SplitDataset(ds, 0.0, 1);
  EXPECT_EQ(all.train.size(), ds.samples.size());
  EXPECT_TRUE(all.val.empty());
  EXPECT_EQ(CodeOf([&] { SplitDataset(ds, 1.0, 1); }), ErrorCode::kSplitDegenerate);
  EXPECT_EQ(CodeOf([&] { SplitDataset(ds, -0.1, 1); }), ErrorCode::kSplitDegenerate);
}

}  // namespace
}  // namespace glyphforge
