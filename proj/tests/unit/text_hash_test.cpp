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

#include "glyphforge/error.hpp"
#include "glyphforge/hash.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge {
namespace {

TEST(Utf8Test, DecodesMixedWidths) {
  const auto cps = DecodeUtf8("a\xC3\xA9\xE6\xB0\xB8\xF0\xA0\x80\x80");
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[0], U'a');
  EXPECT_EQ(cps[1], U'é');
  EXPECT_EQ(cps[2], U'永');
  EXPECT_EQ(cps[3], U'\U00020000');
}

TEST(Utf8Test, RoundTrips) {
  for (char32_t cp : {U'A', U'ÿ', U'永', U'\U0002A6D6'}) {
    const auto back = DecodeUtf8(EncodeUtf8(cp));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], cp);
  }
}

TEST(Utf8Test, RejectsMalformed) {
  for (const char* bad : {"\xC3", "\xE6\xB0", "\xFF", "\x80", "\xC0\x80", "\xED\xA0\x80"}) {
    try {
      DecodeUtf8(bad);
      FAIL() << "accepted malformed input";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kCharsetSpecInvalid);
    }
  }
}

TEST(TextTest, Labels) {
  EXPECT_EQ(CodepointLabel(0x6C38), "U+6C38");
  EXPECT_EQ(CodepointLabel(0x41), "U+0041");
  EXPECT_EQ(CodepointLabel(0x20000), "U+20000");
}

TEST(TextTest, SplitAndTrim) {
  EXPECT_EQ(SplitString("a,b,,c", ','), (std::vector<std::string>{"a", "b", "", "c"}));
  EXPECT_EQ(Trim("  x y \t\n"), "x y");
  EXPECT_EQ(Trim(""), "");
}

TEST(HashTest, KnownVectors) {
  EXPECT_EQ(Sha256Hex(std::string_view("")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashTest, IncrementalMatchesOneShot) {
  Sha256 h;
  h.Update(std::string_view("ab"));
  h.Update(std::string_view("c"));
  EXPECT_EQ(h.HexDigest(), Sha256Hex(std::string_view("abc")));
}

TEST(Base64Test, RoundTripAllPaddings) {
  for (std::size_t n = 0; n < 10; ++n) {
    std::vector<std::uint8_t> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<std::uint8_t>(i * 37 + 250);
    EXPECT_EQ(Base64Decode(Base64Encode(data)), data) << n;
  }
  EXPECT_EQ(Base64Encode(std::vector<std::uint8_t>{'M', 'a', 'n'}), "TWFu");
  EXPECT_EQ(Base64Encode(std::vector<std::uint8_t>{'M'}), "TQ==");
}

TEST(Base64Test, RejectsGarbage) {
  EXPECT_THROW(Base64Decode("abc"), Error);
  EXPECT_THROW(Base64Decode("ab!d"), Error);
  EXPECT_THROW(Base64Decode("a=bc"), Error);
}

TEST(PngTest, LosslessRoundTrip) {
  GrayImage image(7, 5);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) image.pixels[i] = static_cast<std::uint8_t>(i * 7);
  const auto png = EncodePng(image);
  const GrayImage back = DecodePng(png);
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.height, 5);
  EXPECT_EQ(back.pixels, image.pixels);
  EXPECT_EQ(EncodePng(image), png);
}

TEST(PngTest, InkMapsToDarkPixels) {
  const std::vector<float> ink = {0.0f, 1.0f, 0.5f, 2.0f};
  const GrayImage image = InkToImage(ink, 2);
  EXPECT_EQ(image.pixels, (std::vector<std::uint8_t>{255, 0, 127, 0}));
}

TEST(PngTest, RejectsNonPng) {
  const std::vector<std::uint8_t> junk(32, 7);
  EXPECT_THROW(DecodePng(junk), Error);
}

TEST(LabelTest, DrawsInsideBounds) {
  GrayImage image(20, 9);
  DrawLabel(image, 1, 1, "a1?");
  int ink = 0;
  for (auto p : image.pixels) ink += p == 0;
  EXPECT_GT(ink, 10);
  DrawLabel(image, 15, 5, "wide text runs off the edge");
}

}  // namespace
}  // namespace glyphforge
