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

// Style weight construction (one-hot, named mixtures, interpolation paths),
// single-glyph generation from a checkpoint, and specimen sheets.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/checkpoint.hpp"
#include "glyphforge/glyph_corpus.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/style_unet.hpp"
#include "glyphforge/truetype.hpp"

namespace glyphforge {

// Throws Error(kStyleUnknown) when style_id is outside [0, k).
StyleWeights OneHot(int style_id, int k);

struct MixEntry {
  std::string style;  // catalog name, or a decimal id
  double weight = 0.0;
};

struct MixSpec {
  std::vector<MixEntry> entries;
};

// "name=w,name=w". An empty or all-blank string is the empty mix.
// Throws Error(kMixSpecInvalid) on syntax errors or non-finite weights.
MixSpec ParseMixSpec(std::string_view text);

// Referenced weights at their ids, zeros elsewhere; never rescaled.
// Names win over numeric ids when a style is literally named "2".
StyleWeights Mix(const MixSpec& spec, const StyleCatalog& catalog);

// Parses a comma-separated list of exactly k reals.
StyleWeights ParseWeightVector(std::string_view text, int k);

// Linear path; element 0 is `a` and element steps-1 is `b`, bit for bit.
std::vector<StyleWeights> InterpolationPath(const StyleWeights& a, const StyleWeights& b, int steps);

// Fixed-precision rendering used by labels and reports: "0.500,0.500,0.000".
std::string FormatWeights(const StyleWeights& weights);

// Runs one character at a time through a checkpoint. Inputs are rasterized
// from the source font with the dataset's margin and 8-bit quantization, so
// they match what the model saw during training. Safe for concurrent use.
class Generator {
 public:
  Generator(Checkpoint checkpoint, Font source_font, double margin_fraction);

  const Checkpoint& checkpoint() const { return checkpoint_; }
  const ModelConfig& config() const { return checkpoint_.config(); }
  int size() const { return checkpoint_.config().input_size; }

  // Throws Error(kGlyphMissing / kGlyphBlank).
  GlyphBitmap Source(char32_t codepoint) const;
  // Throws as Source, or Error(kStyleDimMismatch).
  std::vector<float> Generate(char32_t codepoint, const StyleWeights& weights) const;
  std::vector<float> Generate(const GlyphBitmap& source, const StyleWeights& weights) const;

 private:
  Checkpoint checkpoint_;
  Font source_font_;
  double margin_fraction_;
};

struct SpecimenColumn {
  std::string label;  // style name for catalog one-hots, otherwise empty
  StyleWeights weights;
};

struct SpecimenCell {
  std::optional<std::vector<float>> pixels;  // empty when the character failed
  std::string failure;                       // error code name
};

struct SpecimenSheet {
  std::vector<char32_t> chars;
  std::vector<SpecimenColumn> columns;
  std::vector<std::vector<SpecimenCell>> cells;  // [row][column]
  int cell_size = 0;
  GrayImage image;

  int rows() const { return static_cast<int>(chars.size()); }
  int cols() const { return static_cast<int>(columns.size()); }
};

// Labels columns with the catalog name when the vector is a one-hot.
std::vector<SpecimenColumn> LabelColumns(const std::vector<StyleWeights>& weights,
                                         const StyleCatalog& catalog);

// Cell (i, j) = generate(chars[i], columns[j]). The image has one label row
// and one label column, each one cell wide. Failed characters become crossed
// boxes; the sheet is still produced.
SpecimenSheet RenderSpecimen(const Generator& generator, const std::vector<char32_t>& chars,
                             const std::vector<SpecimenColumn>& columns);

// Header lines "column<TAB>j<TAB>label<TAB>weights", then one
// "U+XXXX<TAB>j<TAB>reason" line per failed cell.
std::string SpecimenReport(const SpecimenSheet& sheet);

}  // namespace glyphforge
