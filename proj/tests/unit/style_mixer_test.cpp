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

#include <cmath>

#include "glyphforge/error.hpp"
#include "glyphforge/style_mixer.hpp"
#include "test_support.hpp"

namespace glyphforge {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

StyleCatalog Catalog() {
  return StyleCatalog({{0, "song", "a.ttf"}, {1, "kai", "b.ttf"}, {2, "kuaile", "c.ttf"}});
}

TEST(OneHotTest, Basics) {
  EXPECT_EQ(OneHot(1, 3).values(), (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(CodeOf([] { OneHot(3, 3); }), ErrorCode::kStyleUnknown);
  EXPECT_EQ(CodeOf([] { OneHot(-1, 3); }), ErrorCode::kStyleUnknown);
}

TEST(MixSpecTest, Parse) {
  const MixSpec s = ParseMixSpec("song=0.5,kai=0.25");
  ASSERT_EQ(s.entries.size(), 2u);
  EXPECT_EQ(s.entries[0].style, "song");
  EXPECT_EQ(s.entries[0].weight, 0.5);
  EXPECT_EQ(s.entries[1].weight, 0.25);
  EXPECT_TRUE(ParseMixSpec("").entries.empty());
  for (const char* bad : {"song", "=1", "song=abc", "song=nan", "song=inf", "song=1,,kai=1"}) {
    EXPECT_EQ(CodeOf([&] { ParseMixSpec(bad); }), ErrorCode::kMixSpecInvalid) << bad;
  }
}

TEST(MixTest, NamesAndIds) {
  const StyleCatalog c = Catalog();
  EXPECT_EQ(Mix(ParseMixSpec("kai=1"), c), OneHot(1, 3));
  EXPECT_EQ(Mix(ParseMixSpec("2=1"), c), OneHot(2, 3));
  EXPECT_EQ(Mix(ParseMixSpec("song=0.3,kuaile=0.3"), c).values(), (std::vector<double>{0.3, 0, 0.3}));
  EXPECT_EQ(Mix(ParseMixSpec("song=-0.5"), c).values(), (std::vector<double>{-0.5, 0, 0}));
  EXPECT_EQ(Mix(ParseMixSpec(""), c).values(), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(CodeOf([&] { Mix(ParseMixSpec("fangsong=1"), c); }), ErrorCode::kStyleUnknown);
  EXPECT_EQ(CodeOf([&] { Mix(ParseMixSpec("7=1"), c); }), ErrorCode::kStyleUnknown);
  EXPECT_EQ(CodeOf([&] { Mix(ParseMixSpec("kai=1,1=0.5"), c); }), ErrorCode::kMixSpecInvalid);
}

TEST(WeightVectorTest, Parse) {
  EXPECT_EQ(ParseWeightVector("[0.2,0.8]", 2).values(), (std::vector<double>{0.2, 0.8}));
  EXPECT_EQ(ParseWeightVector("1,0,0", 3).values(), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(CodeOf([] { ParseWeightVector("[1,0]", 3); }), ErrorCode::kStyleDimMismatch);
  EXPECT_EQ(CodeOf([] { ParseWeightVector("[1,x]", 2); }), ErrorCode::kMixSpecInvalid);
}

TEST(InterpolationPathTest, EndpointsExactAndLinear) {
  const StyleWeights a = OneHot(0, 3);
  const StyleWeights b = ParseWeightVector("0.1,0.7,0.2", 3);
  const auto path = InterpolationPath(a, b, 11);
  ASSERT_EQ(path.size(), 11u);
  EXPECT_EQ(path.front(), a);
  EXPECT_EQ(path.back(), b);
  for (int t = 0; t < 11; ++t) {
    const double s = t / 10.0;
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(path[t].values()[k], (1 - s) * a.values()[k] + s * b.values()[k], 1e-15);
    }
  }
  EXPECT_EQ(InterpolationPath(a, b, 2).size(), 2u);
  EXPECT_EQ(CodeOf([&] { InterpolationPath(a, b, 1); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(CodeOf([&] { InterpolationPath(a, OneHot(0, 2), 3); }), ErrorCode::kStyleDimMismatch);
}

TEST(FormatWeightsTest, ThreeDecimals) {
  EXPECT_EQ(FormatWeights(ParseWeightVector("0.5,0.25,1", 3)), "0.500,0.250,1.000");
}

class GeneratorTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dataset_ = new Dataset(testing::SmallDataset(2));
    checkpoint_ = new Checkpoint(testing::SmallCheckpoint(*dataset_));
  }
  static void TearDownTestSuite() {
    delete checkpoint_;
    delete dataset_;
  }
  static Generator Make(const std::string& font = "NotoSansSC-Subset.ttf") {
    return Generator(*checkpoint_, Font::FromFile(testing::FontPath(font)), kDefaultMarginFraction);
  }
  static StyleCatalog Cat() { return dataset_->Catalog(); }

  static Dataset* dataset_;
  static Checkpoint* checkpoint_;
};
Dataset* GeneratorTest::dataset_ = nullptr;
Checkpoint* GeneratorTest::checkpoint_ = nullptr;

TEST_F(GeneratorTest, SourceMatchesDatasetInput) {
  const Generator g = Make();
  for (const SamplePair& s : dataset_->samples) {
    EXPECT_EQ(g.Source(s.source.codepoint).pixels, s.source.pixels);
  }
}

TEST_F(GeneratorTest, OneHotAndNamedMixAreIdentical) {
  const Generator g = Make();
  const StyleCatalog c = Cat();
  for (int k = 0; k < c.size(); ++k) {
    const auto a = g.Generate(U'的', OneHot(k, 2));
    const auto b = g.Generate(U'的', Mix(ParseMixSpec(c.at(k).name + "=1"), c));
    const auto v = g.Generate(U'的', ParseWeightVector(k == 0 ? "[1,0]" : "[0,1]", 2));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, v);
  }
}

TEST_F(GeneratorTest, DeterministicAndBounded) {
  const Generator g = Make();
  const StyleWeights w = ParseWeightVector("0.3,0.6", 2);
  const auto a = g.Generate(U'是', w);
  const auto b = Make().Generate(U'是', w);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 32u * 32u);
  for (float v : a) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_NE(a, g.Generate(U'是', OneHot(0, 2)));
}

TEST_F(GeneratorTest, Errors) {
  const Generator g = Make();
  EXPECT_EQ(CodeOf([&] { g.Generate(U'的', OneHot(0, 3)); }), ErrorCode::kStyleDimMismatch);
  EXPECT_EQ(CodeOf([&] { g.Generate(U'\U00020000', OneHot(0, 2)); }), ErrorCode::kGlyphMissing);
  const Generator holes = Make("Fixture-Holes.ttf");
  EXPECT_EQ(CodeOf([&] { holes.Generate(U'\u3000', OneHot(0, 2)); }), ErrorCode::kGlyphBlank);
  GlyphBitmap wrong;
  wrong.size = 16;
  wrong.pixels.assign(256, 0.0f);
  EXPECT_EQ(CodeOf([&] { g.Generate(wrong, OneHot(0, 2)); }), ErrorCode::kShapeMismatch);
}

TEST_F(GeneratorTest, LabelColumns) {
  const StyleCatalog c = Cat();
  const auto cols = LabelColumns({OneHot(1, 2), ParseWeightVector("0.5,0.5", 2), OneHot(0, 2)}, c);
  ASSERT_EQ(cols.size(), 3u);
  EXPECT_EQ(cols[0].label, c.at(1).name);
  EXPECT_EQ(cols[1].label, "");
  EXPECT_EQ(cols[2].label, c.at(0).name);
}

TEST_F(GeneratorTest, SpecimenLayoutAndFailures) {
  // The fixture font has no U+4E0D, so that row is drawn as failed.
  const Generator g = Make("Fixture-Holes.ttf");
  const StyleCatalog c = Cat();
  const std::vector<char32_t> chars = {U'一', U'不', U'的'};
  const auto cols = LabelColumns({OneHot(0, 2), OneHot(1, 2), ParseWeightVector("0.5,0.5", 2)}, c);
  const SpecimenSheet sheet = RenderSpecimen(g, chars, cols);
  EXPECT_EQ(sheet.rows(), 3);
  EXPECT_EQ(sheet.cols(), 3);
  EXPECT_EQ(sheet.image.width, 4 * sheet.cell_size);
  EXPECT_EQ(sheet.image.height, 4 * sheet.cell_size);
  EXPECT_GE(sheet.cell_size, 32);
  for (int j = 0; j < 3; ++j) {
    EXPECT_TRUE(sheet.cells[0][j].pixels.has_value());
    EXPECT_FALSE(sheet.cells[1][j].pixels.has_value());
    EXPECT_EQ(sheet.cells[1][j].failure, "GlyphMissing");
    EXPECT_EQ(*sheet.cells[2][j].pixels, g.Generate(U'的', cols[j].weights));
  }
  const std::string report = SpecimenReport(sheet);
  EXPECT_NE(report.find("column\t0\t" + c.at(0).name + "\t1.000,0.000\n"), std::string::npos) << report;
  EXPECT_NE(report.find("column\t2\t-\t0.500,0.500\n"), std::string::npos) << report;
  EXPECT_NE(report.find("U+4E0D\t0\tGlyphMissing\n"), std::string::npos) << report;
}

TEST_F(GeneratorTest, SpecimenIsDeterministic) {
  const Generator g = Make();
  const auto cols = LabelColumns({OneHot(0, 2), OneHot(1, 2)}, Cat());
  const SpecimenSheet a = RenderSpecimen(g, {U'一', U'是'}, cols);
  const SpecimenSheet b = RenderSpecimen(g, {U'一', U'是'}, cols);
  EXPECT_EQ(EncodePng(a.image), EncodePng(b.image));
}

}  // namespace
}  // namespace glyphforge
