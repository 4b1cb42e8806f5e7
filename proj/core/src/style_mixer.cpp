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

#include "glyphforge/style_mixer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "glyphforge/error.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge {
namespace {

bool ParseReal(std::string_view text, double& out) {
  text = Trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ParseId(std::string_view text, int& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return !text.empty() && ec == std::errc() && ptr == end;
}

}  // namespace

StyleWeights OneHot(int style_id, int k) {
  if (style_id < 0 || style_id >= k) {
    throw Error(ErrorCode::kStyleUnknown,
                "style id " + std::to_string(style_id) + " outside 0.." + std::to_string(k - 1));
  }
  std::vector<double> v(static_cast<std::size_t>(k), 0.0);
  v[static_cast<std::size_t>(style_id)] = 1.0;
  return StyleWeights(std::move(v));
}

MixSpec ParseMixSpec(std::string_view text) {
  MixSpec spec;
  if (Trim(text).empty()) return spec;
  for (const std::string& item : SplitString(text, ',')) {
    const std::string_view entry = Trim(item);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kMixSpecInvalid, "mix entry without '=': " + std::string(entry));
    }
    MixEntry e;
    e.style = std::string(Trim(entry.substr(0, eq)));
    if (e.style.empty()) throw Error(ErrorCode::kMixSpecInvalid, "mix entry without a style");
    if (!ParseReal(entry.substr(eq + 1), e.weight) || !std::isfinite(e.weight)) {
      throw Error(ErrorCode::kMixSpecInvalid, "bad weight for " + e.style);
    }
    spec.entries.push_back(std::move(e));
  }
  return spec;
}

StyleWeights Mix(const MixSpec& spec, const StyleCatalog& catalog) {
  std::vector<double> v(static_cast<std::size_t>(catalog.size()), 0.0);
  std::set<int> seen;
  for (const MixEntry& e : spec.entries) {
    if (!std::isfinite(e.weight)) throw Error(ErrorCode::kMixSpecInvalid, "non-finite weight for " + e.style);
    int id = -1;
    for (const StyleEntry& s : catalog.entries()) {
      if (s.name == e.style) id = s.style_id;
    }
    if (id < 0) {
      if (!ParseId(e.style, id) || id < 0 || id >= catalog.size()) {
        throw Error(ErrorCode::kStyleUnknown, "unknown style: " + e.style);
      }
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kMixSpecInvalid, "style referenced twice: " + e.style);
    }
    v[static_cast<std::size_t>(id)] = e.weight;
  }
  return StyleWeights(std::move(v));
}

StyleWeights ParseWeightVector(std::string_view text, int k) {
  std::string_view body = Trim(text);
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::vector<double> v;
  if (!Trim(body).empty()) {
    for (const std::string& item : SplitString(body, ',')) {
      double x = 0.0;
      if (!ParseReal(item, x) || !std::isfinite(x)) {
        throw Error(ErrorCode::kMixSpecInvalid, "bad weight: " + std::string(Trim(item)));
      }
      v.push_back(x);
    }
  }
  if (static_cast<int>(v.size()) != k) {
    throw Error(ErrorCode::kStyleDimMismatch,
                "expected " + std::to_string(k) + " weights, got " + std::to_string(v.size()));
  }
  return StyleWeights(std::move(v));
}

std::vector<StyleWeights> InterpolationPath(const StyleWeights& a, const StyleWeights& b, int steps) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kStyleDimMismatch, "interpolation endpoints differ in length");
  }
  if (steps < 2) throw Error(ErrorCode::kConfigInvalid, "interpolation needs at least 2 steps");
  std::vector<StyleWeights> path;
  path.reserve(static_cast<std::size_t>(steps));
  path.push_back(a);
  for (int t = 1; t + 1 < steps; ++t) {
    const double f = static_cast<double>(t) / (steps - 1);
    std::vector<double> v(static_cast<std::size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) v[static_cast<std::size_t>(i)] = a[i] + (b[i] - a[i]) * f;
    path.emplace_back(std::move(v));
  }
  path.push_back(b);
  return path;
}

std::string FormatWeights(const StyleWeights& weights) {
  std::string out;
  char buf[32];
  for (int i = 0; i < weights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f", weights[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

Generator::Generator(Checkpoint checkpoint, Font source_font, double margin_fraction)
    : checkpoint_(std::move(checkpoint)),
      source_font_(std::move(source_font)),
      margin_fraction_(margin_fraction) {}

GlyphBitmap Generator::Source(char32_t codepoint) const {
  GlyphBitmap g = RasterizeGlyph(source_font_, codepoint, size(), margin_fraction_, kSourceStyleId);
  for (float& p : g.pixels) p = DequantizePixel(QuantizePixel(p));
  return g;
}

std::vector<float> Generator::Generate(char32_t codepoint, const StyleWeights& weights) const {
  return Generate(Source(codepoint), weights);
}

std::vector<float> Generator::Generate(const GlyphBitmap& source, const StyleWeights& weights) const {
  if (weights.size() != config().style_count) {
    throw Error(ErrorCode::kStyleDimMismatch, "expected " + std::to_string(config().style_count) +
                                                  " weights, got " + std::to_string(weights.size()));
  }
  if (source.size != size()) throw Error(ErrorCode::kShapeMismatch, "source bitmap size differs from model");
  Tensor<float> input(1, 1, size(), size());
  std::copy(source.pixels.begin(), source.pixels.end(), input.data());
  const Tensor<float> out = Forward<float>(checkpoint_.params, input, weights);
  return std::vector<float>(out.values().begin(), out.values().end());
}

std::vector<SpecimenColumn> LabelColumns(const std::vector<StyleWeights>& weights,
                                         const StyleCatalog& catalog) {
  std::vector<SpecimenColumn> columns;
  for (const StyleWeights& w : weights) {
    SpecimenColumn c{"", w};
    for (const StyleEntry& s : catalog.entries()) {
      if (w.size() == catalog.size() && w == OneHot(s.style_id, catalog.size())) c.label = s.name;
    }
    columns.push_back(std::move(c));
  }
  return columns;
}

namespace {

void DrawCrossedBox(GrayImage& image, int x, int y, int size) {
  const int inset = size / 8;
  const int x0 = x + inset, y0 = y + inset, x1 = x + size - 1 - inset, y1 = y + size - 1 - inset;
  DrawRect(image, x0, y0, x1, y1);
  DrawLine(image, x0, y0, x1, y1);
  DrawLine(image, x0, y1, x1, y0);
}

void DrawColumnLabel(GrayImage& image, int x, int y, int size, const SpecimenColumn& column) {
  std::vector<std::string> lines;
  lines.push_back(column.label.empty() ? "mix" : column.label);
  char buf[32];
  for (int i = 0; i < column.weights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f", column.weights[i]);
    lines.emplace_back(buf);
  }
  const int max_chars = std::max(1, (size - 2) / kLabelAdvance);
  const int max_lines = std::max(1, (size - 2) / kLabelLineHeight);
  for (int i = 0; i < static_cast<int>(lines.size()) && i < max_lines; ++i) {
    std::string line = lines[static_cast<std::size_t>(i)].substr(0, static_cast<std::size_t>(max_chars));
    DrawLabel(image, x + 2, y + 2 + i * kLabelLineHeight, line);
  }
}

}  // namespace

SpecimenSheet RenderSpecimen(const Generator& generator, const std::vector<char32_t>& chars,
                             const std::vector<SpecimenColumn>& columns) {
  SpecimenSheet sheet;
  sheet.chars = chars;
  sheet.columns = columns;
  sheet.cell_size = generator.size();
  const int s = sheet.cell_size;
  sheet.image = GrayImage((sheet.cols() + 1) * s, (sheet.rows() + 1) * s);

  for (int j = 0; j < sheet.cols(); ++j) {
    DrawColumnLabel(sheet.image, (j + 1) * s, 0, s, columns[static_cast<std::size_t>(j)]);
  }
  for (int i = 0; i < sheet.rows(); ++i) {
    const char32_t cp = chars[static_cast<std::size_t>(i)];
    const int y = (i + 1) * s;
    std::vector<SpecimenCell> row(static_cast<std::size_t>(sheet.cols()));
    std::optional<GlyphBitmap> source;
    std::string failure;
    try {
      source = generator.Source(cp);
    } catch (const Error& e) {
      failure = std::string(ErrorCodeName(e.code()));
    }
    if (source) {
      Blit(sheet.image, InkToImage(source->pixels, s), 0, y);
    } else {
      DrawCrossedBox(sheet.image, 0, y, s);
    }
    for (int j = 0; j < sheet.cols(); ++j) {
      SpecimenCell& cell = row[static_cast<std::size_t>(j)];
      const int x = (j + 1) * s;
      if (source) {
        cell.pixels = generator.Generate(*source, columns[static_cast<std::size_t>(j)].weights);
        Blit(sheet.image, InkToImage(*cell.pixels, s), x, y);
      } else {
        cell.failure = failure;
        DrawCrossedBox(sheet.image, x, y, s);
      }
    }
    sheet.cells.push_back(std::move(row));
  }
  return sheet;
}

std::string SpecimenReport(const SpecimenSheet& sheet) {
  std::ostringstream out;
  for (int j = 0; j < sheet.cols(); ++j) {
    const SpecimenColumn& c = sheet.columns[static_cast<std::size_t>(j)];
    out << "column\t" << j << '\t' << (c.label.empty() ? "-" : c.label) << '\t' << FormatWeights(c.weights)
        << '\n';
  }
  for (int i = 0; i < sheet.rows(); ++i) {
    for (int j = 0; j < sheet.cols(); ++j) {
      const SpecimenCell& cell = sheet.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!cell.pixels) {
        out << CodepointLabel(sheet.chars[static_cast<std::size_t>(i)]) << '\t' << j << '\t' << cell.failure
            << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace glyphforge
