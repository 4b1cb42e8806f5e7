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

#include "glyphforge/glyph_corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "glyphforge/error.hpp"
#include "glyphforge/hash.hpp"
#include "glyphforge/rasterizer.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge {

extern const char kBuiltinCharsetUtf8[];

namespace {

constexpr std::string_view kContainerMagic = "glyphforge-dataset 1";

bool IsPowerOfTwo(int v) { return v > 0 && (v & (v - 1)) == 0; }

void ValidateStyleName(const std::string& name) {
  if (name.empty() || name.find_first_of("\t\n\r,=") != std::string::npos) {
    throw Error(ErrorCode::kCatalogInvalid,
                "style name must be non-empty and free of tab, newline, ',' and '=': '" + name +
                    "'");
  }
}

char32_t ParseCodepointToken(std::string_view token) {
  if (token.size() < 3 || (token[0] != 'U' && token[0] != 'u') || token[1] != '+') {
    throw Error(ErrorCode::kCharsetSpecInvalid, "expected U+XXXX, got '" + std::string(token) + "'");
  }
  unsigned value = 0;
  const auto hex = token.substr(2);
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size() || value > 0x10FFFF) {
    throw Error(ErrorCode::kCharsetSpecInvalid, "bad codepoint '" + std::string(token) + "'");
  }
  return static_cast<char32_t>(value);
}

std::vector<char32_t> SortUnique(std::vector<char32_t> cps) {
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.empty()) throw Error(ErrorCode::kCharsetEmpty, "charset is empty");
  return cps;
}

std::vector<char32_t> ParseCharsetText(std::string_view text) {
  std::vector<char32_t> cps;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (token.size() > 2 && (token[0] == 'U' || token[0] == 'u') && token[1] == '+') {
      cps.push_back(ParseCodepointToken(token));
    } else {
      for (char32_t c : DecodeUtf8(token)) cps.push_back(c);
    }
    token.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return cps;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path, ErrorCode missing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(missing, (missing == ErrorCode::kFontNotFound ? "font not found: "
                                                               : "cannot read file: ") +
                             path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string FormatMargin(double margin) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", margin);
  return buf;
}

std::string DefaultName(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  std::transform(stem.begin(), stem.end(), stem.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return stem;
}

std::string CanonicalHeader(const Dataset& d) {
  const DatasetManifest& m = d.manifest;
  std::ostringstream out;
  out << kContainerMagic << '\n';
  out << "source\t" << m.source_font.name << '\t' << m.source_font.path << '\t'
      << m.source_font.content_hash << '\n';
  for (std::size_t i = 0; i < m.target_fonts.size(); ++i) {
    const FontRef& t = m.target_fonts[i];
    out << "target\t" << i << '\t' << t.name << '\t' << t.path << '\t' << t.content_hash << '\n';
  }
  out << "size\t" << m.size << '\n';
  out << "margin\t" << FormatMargin(m.margin_fraction) << '\n';
  out << "split_seed\t" << m.split_seed << '\n';
  out << "charset\t";
  for (std::size_t i = 0; i < m.charset.size(); ++i) {
    out << (i ? " " : "") << CodepointLabel(m.charset[i]);
  }
  out << '\n';
  for (const SkipEntry& s : d.skipped) {
    out << "skip\t" << CodepointLabel(s.codepoint) << '\t' << s.style_id << '\t' << s.reason
        << '\n';
  }
  out << "samples\t" << d.samples.size() << '\n';
  return out.str();
}

void AppendU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::vector<std::uint8_t> SampleBytes(const Dataset& d) {
  const std::size_t px = static_cast<std::size_t>(d.manifest.size) * d.manifest.size;
  std::vector<std::uint8_t> out;
  out.reserve(d.samples.size() * (8 + 2 * px));
  for (const SamplePair& s : d.samples) {
    AppendU32(out, static_cast<std::uint32_t>(s.source.codepoint));
    AppendU32(out, static_cast<std::uint32_t>(s.style_id));
    for (float v : s.source.pixels) out.push_back(QuantizePixel(v));
    for (float v : s.target.pixels) out.push_back(QuantizePixel(v));
  }
  return out;
}

std::string ContentHash(const std::string& header, const std::vector<std::uint8_t>& samples) {
  Sha256 h;
  h.Update(header);
  h.Update(samples);
  return h.HexDigest();
}

}  // namespace

StyleCatalog::StyleCatalog(std::vector<StyleEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].style_id != static_cast<int>(i)) {
      throw Error(ErrorCode::kCatalogInvalid, "style ids must be exactly 0..K-1 in order");
    }
    ValidateStyleName(entries_[i].name);
    if (!names.insert(entries_[i].name).second) {
      throw Error(ErrorCode::kCatalogInvalid, "duplicate style name '" + entries_[i].name + "'");
    }
  }
}

const StyleEntry& StyleCatalog::at(int style_id) const {
  if (style_id < 0 || style_id >= size()) {
    throw Error(ErrorCode::kStyleUnknown, "unknown style id " + std::to_string(style_id));
  }
  return entries_[static_cast<std::size_t>(style_id)];
}

int StyleCatalog::IdForName(std::string_view name) const {
  for (const StyleEntry& e : entries_) {
    if (e.name == name) return e.style_id;
  }
  throw Error(ErrorCode::kStyleUnknown, "unknown style '" + std::string(name) + "'");
}

CatalogFile ReadCatalogFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read catalog: " + path.string());
  CatalogFile file;
  std::vector<StyleEntry> entries;
  std::string line;
  bool have_source = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitString(line, '\t');
    if (f[0] == "source" && f.size() == 3) {
      file.source_name = f[1];
      file.source_path = f[2];
      have_source = true;
    } else if (f[0] == "margin" && f.size() == 2) {
      file.margin_fraction = std::stod(f[1]);
    } else if (f[0] == "style" && f.size() == 4) {
      entries.push_back({std::stoi(f[1]), f[2], f[3]});
    } else {
      throw Error(ErrorCode::kCatalogInvalid, "bad catalog line: " + line);
    }
  }
  if (!have_source || entries.empty()) {
    throw Error(ErrorCode::kCatalogInvalid, "catalog needs a source line and at least one style");
  }
  file.catalog = StyleCatalog(std::move(entries));
  return file;
}

void WriteCatalogFile(const std::filesystem::path& path, const CatalogFile& file) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write catalog: " + path.string());
  out << "# glyphforge style catalog\n";
  out << "source\t" << file.source_name << '\t' << file.source_path << '\n';
  out << "margin\t" << FormatMargin(file.margin_fraction) << '\n';
  for (const StyleEntry& e : file.catalog.entries()) {
    out << "style\t" << e.style_id << '\t' << e.name << '\t' << e.font_source << '\n';
  }
}

const std::vector<char32_t>& BuiltinCharset() {
  static const std::vector<char32_t> kList = [] {
    std::vector<char32_t> out;
    for (char32_t c : DecodeUtf8(kBuiltinCharsetUtf8)) {
      if (c > 0x20 && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
  }();
  return kList;
}

std::vector<char32_t> LoadCharset(std::string_view spec) {
  spec = Trim(spec);
  if (spec.empty()) throw Error(ErrorCode::kCharsetSpecInvalid, "empty charset spec");

  if (spec.starts_with("builtin:top")) {
    const auto digits = spec.substr(11);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw Error(ErrorCode::kCharsetSpecInvalid, "bad builtin spec '" + std::string(spec) + "'");
    }
    const auto& list = BuiltinCharset();
    if (n > list.size()) {
      throw Error(ErrorCode::kCharsetSpecInvalid,
                  "builtin list has only " + std::to_string(list.size()) + " characters");
    }
    return SortUnique({list.begin(), list.begin() + static_cast<std::ptrdiff_t>(n)});
  }

  std::string_view range = spec;
  if (range.starts_with("range:")) range.remove_prefix(6);
  if (const auto dots = range.find(".."); dots != std::string_view::npos &&
                                          (range[0] == 'U' || range[0] == 'u')) {
    const char32_t lo = ParseCodepointToken(range.substr(0, dots));
    const char32_t hi = ParseCodepointToken(range.substr(dots + 2));
    if (hi < lo) throw Error(ErrorCode::kCharsetSpecInvalid, "inverted codepoint range");
    if (hi - lo > 0x20000) throw Error(ErrorCode::kCharsetSpecInvalid, "codepoint range too large");
    std::vector<char32_t> cps;
    for (char32_t c = lo; c <= hi; ++c) cps.push_back(c);
    return SortUnique(std::move(cps));
  }

  std::string_view file = spec;
  if (file.starts_with("file:")) {
    file.remove_prefix(5);
  } else if (!std::filesystem::exists(std::filesystem::path(std::string(file)))) {
    throw Error(ErrorCode::kCharsetSpecInvalid, "unrecognized charset spec '" + std::string(spec) + "'");
  }
  const auto bytes = ReadFileBytes(std::string(file), ErrorCode::kCharsetSpecInvalid);
  return SortUnique(ParseCharsetText(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())));
}

GlyphBitmap RasterizeGlyph(const Font& font, char32_t codepoint, int size, double margin_fraction,
                           int style_id) {
  if (!IsPowerOfTwo(size) || size < 8) {
    throw Error(ErrorCode::kConfigInvalid, "glyph size must be a power of two >= 8");
  }
  if (!(margin_fraction >= 0.0 && margin_fraction < 0.5)) {
    throw Error(ErrorCode::kConfigInvalid, "margin fraction must be in [0, 0.5)");
  }
  const auto glyph = font.GlyphIndex(codepoint);
  if (!glyph) {
    throw Error(ErrorCode::kGlyphMissing, "glyph missing for " + CodepointLabel(codepoint));
  }
  const Outline outline = font.LoadOutline(*glyph);

  // Ink bounds over the curve hull; quadratic segments never leave it.
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const Contour& c : outline.contours) {
    for (const OutlinePoint& p : c) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  const double extent = std::max(max_x - min_x, max_y - min_y);
  if (outline.contours.empty() || !(extent > 0.0)) {
    throw Error(ErrorCode::kGlyphBlank, "glyph is blank for " + CodepointLabel(codepoint));
  }

  const double inner = (1.0 - 2.0 * margin_fraction) * size;
  const double scale = inner / extent;
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  const double half = 0.5 * size;
  auto to_px = [&](const OutlinePoint& p) {
    return std::pair{half + (p.x - cx) * scale, half - (p.y - cy) * scale};
  };

  CoverageRasterizer raster(size, size);
  for (const Contour& contour : outline.contours) {
    const std::size_t n = contour.size();
    // Start from an on-curve point, synthesizing one if every point is off-curve.
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (contour[i].on_curve) {
        start = i;
        break;
      }
    }
    OutlinePoint first;
    if (start == n) {
      first = {0.5 * (contour[0].x + contour[n - 1].x), 0.5 * (contour[0].y + contour[n - 1].y),
               true};
      start = 0;
    } else {
      first = contour[start];
      start = start + 1;
    }
    auto [px, py] = to_px(first);
    bool have_ctrl = false;
    std::pair<double, double> ctrl;
    for (std::size_t k = 0; k < n; ++k) {
      const OutlinePoint& p = contour[(start + k) % n];
      const auto q = to_px(p);
      if (p.on_curve) {
        if (have_ctrl) {
          raster.AddQuadratic(px, py, ctrl.first, ctrl.second, q.first, q.second);
          have_ctrl = false;
        } else {
          raster.AddLine(px, py, q.first, q.second);
        }
        px = q.first;
        py = q.second;
      } else {
        if (have_ctrl) {
          const double mx = 0.5 * (ctrl.first + q.first), my = 0.5 * (ctrl.second + q.second);
          raster.AddQuadratic(px, py, ctrl.first, ctrl.second, mx, my);
          px = mx;
          py = my;
        }
        ctrl = q;
        have_ctrl = true;
      }
    }
    const auto end = to_px(first);
    if (have_ctrl) {
      raster.AddQuadratic(px, py, ctrl.first, ctrl.second, end.first, end.second);
    } else {
      raster.AddLine(px, py, end.first, end.second);
    }
  }

  GlyphBitmap bitmap;
  bitmap.codepoint = codepoint;
  bitmap.style_id = style_id;
  bitmap.size = size;
  bitmap.pixels = raster.Finish();
  if (*std::max_element(bitmap.pixels.begin(), bitmap.pixels.end()) <= 0.0f) {
    throw Error(ErrorCode::kGlyphBlank, "glyph is blank for " + CodepointLabel(codepoint));
  }
  return bitmap;
}

StyleCatalog Dataset::Catalog() const {
  std::vector<StyleEntry> entries;
  for (std::size_t i = 0; i < manifest.target_fonts.size(); ++i) {
    entries.push_back({static_cast<int>(i), manifest.target_fonts[i].name,
                       manifest.target_fonts[i].path});
  }
  return StyleCatalog(std::move(entries));
}

Dataset BuildDataset(const FontRef& source, const std::vector<FontRef>& targets,
                     const std::vector<char32_t>& charset, const BuildOptions& options) {
  const Font source_font = Font::FromFile(source.path);
  std::vector<Font> target_fonts;
  target_fonts.reserve(targets.size());
  for (const FontRef& t : targets) target_fonts.push_back(Font::FromFile(t.path));
  return BuildDataset(source, source_font, targets, target_fonts, charset, options);
}

Dataset BuildDataset(const FontRef& source_ref, const Font& source,
                     const std::vector<FontRef>& target_refs, const std::vector<Font>& targets,
                     const std::vector<char32_t>& charset, const BuildOptions& options) {
  if (targets.empty() || targets.size() != target_refs.size()) {
    throw Error(ErrorCode::kDatasetInvalid, "at least one target font is required");
  }
  if (charset.empty()) throw Error(ErrorCode::kCharsetEmpty, "charset is empty");
  if (!std::is_sorted(charset.begin(), charset.end()) ||
      std::adjacent_find(charset.begin(), charset.end()) != charset.end()) {
    throw Error(ErrorCode::kCharsetSpecInvalid, "charset must be sorted and duplicate-free");
  }

  Dataset d;
  DatasetManifest& m = d.manifest;
  m.source_font = source_ref;
  if (m.source_font.name.empty()) m.source_font.name = DefaultName(source_ref.path);
  m.source_font.content_hash = Sha256Hex(source.bytes());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    FontRef t = target_refs[i];
    if (t.name.empty()) t.name = DefaultName(t.path);
    t.content_hash = Sha256Hex(targets[i].bytes());
    m.target_fonts.push_back(std::move(t));
  }
  m.charset = charset;
  m.size = options.size;
  m.margin_fraction = options.margin_fraction;
  m.split_seed = options.split_seed;
  (void)d.Catalog();  // validates target names

  // Each codepoint is rasterized independently into its own slot, so the
  // assembled result does not depend on the worker count.
  struct Slot {
    std::vector<SamplePair> samples;
    std::vector<SkipEntry> skipped;
  };
  std::vector<Slot> slots(charset.size());
  auto work = [&](std::size_t index) {
    const char32_t cp = charset[index];
    Slot& slot = slots[index];
    GlyphBitmap src;
    try {
      src = RasterizeGlyph(source, cp, options.size, options.margin_fraction, kSourceStyleId);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGlyphMissing && e.code() != ErrorCode::kGlyphBlank) throw;
      for (std::size_t s = 0; s < targets.size(); ++s) {
        slot.skipped.push_back(
            {cp, static_cast<int>(s), "source:" + std::string(ErrorCodeName(e.code()))});
      }
      return;
    }
    for (std::size_t s = 0; s < targets.size(); ++s) {
      const int style = static_cast<int>(s);
      try {
        GlyphBitmap tgt = RasterizeGlyph(targets[s], cp, options.size, options.margin_fraction, style);
        slot.samples.push_back({src, std::move(tgt), style});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kGlyphMissing && e.code() != ErrorCode::kGlyphBlank) throw;
        slot.skipped.push_back({cp, style, std::string(ErrorCodeName(e.code()))});
      }
    }
  };

  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(charset.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < charset.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = static_cast<std::size_t>(w); i < charset.size();
               i += static_cast<std::size_t>(workers)) {
            work(i);
          }
        } catch (...) {
          failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  for (Slot& slot : slots) {
    for (SamplePair& s : slot.samples) d.samples.push_back(std::move(s));
    for (SkipEntry& s : slot.skipped) d.skipped.push_back(std::move(s));
  }
  if (d.samples.empty()) {
    throw Error(ErrorCode::kDatasetEmpty, "no usable samples: every glyph pair failed");
  }
  // Store exactly what the container will hold.
  for (SamplePair& s : d.samples) {
    for (float& v : s.source.pixels) v = DequantizePixel(QuantizePixel(v));
    for (float& v : s.target.pixels) v = DequantizePixel(QuantizePixel(v));
    s.source.style_id = kSourceStyleId;
  }
  m.content_hash = ContentHash(CanonicalHeader(d), SampleBytes(d));
  return d;
}

std::vector<std::uint8_t> SerializeDataset(const Dataset& dataset) {
  const std::string header = CanonicalHeader(dataset);
  const std::vector<std::uint8_t> samples = SampleBytes(dataset);
  const std::string trailer = "content_hash\t" + ContentHash(header, samples) + "\nend\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), trailer.begin(), trailer.end());
  out.insert(out.end(), samples.begin(), samples.end());
  return out;
}

Dataset DeserializeDataset(std::span<const std::uint8_t> bytes) {
  const std::string_view all(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  auto invalid = [](const std::string& why) {
    return Error(ErrorCode::kDatasetInvalid, "dataset container: " + why);
  };
  const auto end_at = all.find("\nend\n");
  if (!all.starts_with(kContainerMagic) || end_at == std::string_view::npos) {
    throw invalid("missing header");
  }
  const std::string_view header_block = all.substr(0, end_at + 1);
  const std::size_t body_at = end_at + 5;

  Dataset d;
  DatasetManifest& m = d.manifest;
  std::size_t expected_samples = 0;
  std::string stored_hash;
  std::size_t hash_line_at = std::string_view::npos;
  std::size_t pos = 0;
  while (pos < header_block.size()) {
    const std::size_t nl = header_block.find('\n', pos);
    const std::string line(header_block.substr(pos, nl - pos));
    const std::size_t line_at = pos;
    pos = nl + 1;
    const auto f = SplitString(line, '\t');
    try {
      if (f[0] == kContainerMagic) {
      } else if (f[0] == "source" && f.size() == 4) {
        m.source_font = {f[1], f[2], f[3]};
      } else if (f[0] == "target" && f.size() == 5) {
        if (std::stoul(f[1]) != m.target_fonts.size()) throw invalid("target order");
        m.target_fonts.push_back({f[2], f[3], f[4]});
      } else if (f[0] == "size" && f.size() == 2) {
        m.size = std::stoi(f[1]);
      } else if (f[0] == "margin" && f.size() == 2) {
        m.margin_fraction = std::stod(f[1]);
      } else if (f[0] == "split_seed" && f.size() == 2) {
        m.split_seed = std::stoull(f[1]);
      } else if (f[0] == "charset" && f.size() == 2) {
        for (const auto& tok : SplitString(f[1], ' ')) m.charset.push_back(ParseCodepointToken(tok));
      } else if (f[0] == "skip" && f.size() == 4) {
        d.skipped.push_back({ParseCodepointToken(f[1]), std::stoi(f[2]), f[3]});
      } else if (f[0] == "samples" && f.size() == 2) {
        expected_samples = std::stoull(f[1]);
      } else if (f[0] == "content_hash" && f.size() == 2) {
        stored_hash = f[1];
        hash_line_at = line_at;
      } else {
        throw invalid("unexpected header line '" + line + "'");
      }
    } catch (const std::logic_error&) {
      throw invalid("malformed header line '" + line + "'");
    }
  }
  if (hash_line_at == std::string_view::npos || !IsPowerOfTwo(m.size) || m.target_fonts.empty()) {
    throw invalid("incomplete header");
  }
  const std::size_t px = static_cast<std::size_t>(m.size) * static_cast<std::size_t>(m.size);
  const std::size_t record = 8 + 2 * px;
  if (bytes.size() - body_at != expected_samples * record) throw invalid("truncated sample data");

  auto u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t{bytes[at + k]} << (8 * k);
    return v;
  };
  d.samples.reserve(expected_samples);
  for (std::size_t i = 0; i < expected_samples; ++i) {
    const std::size_t at = body_at + i * record;
    SamplePair s;
    s.style_id = static_cast<int>(u32(at + 4));
    if (s.style_id < 0 || s.style_id >= static_cast<int>(m.target_fonts.size())) {
      throw invalid("sample style id out of range");
    }
    s.source.codepoint = s.target.codepoint = static_cast<char32_t>(u32(at));
    s.source.style_id = kSourceStyleId;
    s.target.style_id = s.style_id;
    s.source.size = s.target.size = m.size;
    s.source.pixels.resize(px);
    s.target.pixels.resize(px);
    for (std::size_t k = 0; k < px; ++k) {
      s.source.pixels[k] = DequantizePixel(bytes[at + 8 + k]);
      s.target.pixels[k] = DequantizePixel(bytes[at + 8 + px + k]);
    }
    d.samples.push_back(std::move(s));
  }

  const std::string_view hashed_header = header_block.substr(0, hash_line_at);
  Sha256 h;
  h.Update(hashed_header);
  h.Update(bytes.subspan(body_at));
  if (h.HexDigest() != stored_hash) throw invalid("content hash mismatch");
  m.content_hash = stored_hash;
  if (CanonicalHeader(d) != hashed_header) throw invalid("non-canonical header");
  return d;
}

void SaveDataset(const std::filesystem::path& path, const Dataset& dataset) {
  const auto bytes = SerializeDataset(dataset);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write dataset: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write: " + path.string());
}

Dataset LoadDataset(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path, ErrorCode::kIoError);
  return DeserializeDataset(bytes);
}

void WriteSkipReport(std::ostream& out, const std::vector<SkipEntry>& skipped) {
  for (const SkipEntry& s : skipped) {
    out << CodepointLabel(s.codepoint) << '\t' << s.style_id << '\t' << s.reason << '\n';
  }
}

DatasetSplit SplitDataset(const Dataset& dataset, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::kSplitDegenerate, "val_fraction must be in [0, 1)");
  }
  if (dataset.samples.empty()) throw Error(ErrorCode::kDatasetEmpty, "dataset has no samples");
  std::vector<char32_t> cps;
  for (const SamplePair& s : dataset.samples) cps.push_back(s.source.codepoint);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  const auto n_val = static_cast<std::size_t>(std::floor(val_fraction * cps.size() + 1e-9));
  if (n_val >= cps.size()) {
    throw Error(ErrorCode::kSplitDegenerate, "val_fraction leaves no training codepoints");
  }
  // Fisher-Yates on raw engine output keeps the permutation portable.
  std::mt19937_64 rng(seed);
  std::vector<char32_t> order = cps;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  const std::set<char32_t> held_out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));

  DatasetSplit split;
  for (const SamplePair& s : dataset.samples) {
    (held_out.count(s.source.codepoint) ? split.val : split.train).push_back(s);
  }
  return split;
}

}  // namespace glyphforge
