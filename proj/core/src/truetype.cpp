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

#include "glyphforge/truetype.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "glyphforge/error.hpp"

namespace glyphforge {
namespace {

constexpr int kMaxCompositeDepth = 8;

class Reader {
 public:
  Reader(std::span<const std::uint8_t> data, const std::string& origin)
      : data_(data), origin_(origin) {}

  std::uint8_t U8(std::size_t at) const {
    Check(at, 1);
    return data_[at];
  }
  std::uint16_t U16(std::size_t at) const {
    Check(at, 2);
    return static_cast<std::uint16_t>((data_[at] << 8) | data_[at + 1]);
  }
  std::int16_t I16(std::size_t at) const { return static_cast<std::int16_t>(U16(at)); }
  std::uint32_t U32(std::size_t at) const {
    Check(at, 4);
    return (std::uint32_t{data_[at]} << 24) | (std::uint32_t{data_[at + 1]} << 16) |
           (std::uint32_t{data_[at + 2]} << 8) | std::uint32_t{data_[at + 3]};
  }

  void Check(std::size_t at, std::size_t n) const {
    if (at + n > data_.size() || at + n < at) {
      throw Error(ErrorCode::kFontInvalid, "font " + origin_ + ": truncated table data");
    }
  }

 private:
  std::span<const std::uint8_t> data_;
  const std::string& origin_;
};

double F2Dot14(std::int16_t v) { return static_cast<double>(v) / 16384.0; }

}  // namespace

Font Font::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFontNotFound, "font not found: " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return FromBytes(std::move(bytes), path.string());
}

Font Font::FromBytes(std::vector<std::uint8_t> bytes, std::string origin) {
  Font font;
  font.bytes_ = std::move(bytes);
  font.origin_ = std::move(origin);
  const Reader r(font.bytes_, font.origin_);

  const std::uint32_t version = r.U32(0);
  if (version != 0x00010000u && version != 0x74727565u /* 'true' */) {
    throw Error(ErrorCode::kFontInvalid,
                "font " + font.origin_ + ": not a TrueType outline font");
  }
  const std::uint16_t num_tables = r.U16(4);
  std::uint32_t head = 0, maxp = 0, cmap = 0, loca = 0, glyf = 0, glyf_len = 0;
  for (std::uint16_t i = 0; i < num_tables; ++i) {
    const std::size_t rec = 12 + 16 * std::size_t{i};
    char tag[5] = {};
    for (int k = 0; k < 4; ++k) tag[k] = static_cast<char>(r.U8(rec + k));
    const std::uint32_t offset = r.U32(rec + 8);
    const std::uint32_t length = r.U32(rec + 12);
    r.Check(offset, length);
    if (std::strcmp(tag, "head") == 0) head = offset;
    else if (std::strcmp(tag, "maxp") == 0) maxp = offset;
    else if (std::strcmp(tag, "cmap") == 0) cmap = offset;
    else if (std::strcmp(tag, "loca") == 0) loca = offset;
    else if (std::strcmp(tag, "glyf") == 0) { glyf = offset; glyf_len = length; }
  }
  if (!head || !maxp || !cmap || !loca || !glyf) {
    throw Error(ErrorCode::kFontInvalid,
                "font " + font.origin_ + ": missing one of head/maxp/cmap/loca/glyf");
  }
  font.units_per_em_ = r.U16(head + 18);
  font.long_loca_ = r.I16(head + 50) != 0;
  font.glyph_count_ = r.U16(maxp + 4);
  font.loca_offset_ = loca;
  font.glyf_offset_ = glyf;
  font.glyf_length_ = glyf_len;
  if (font.units_per_em_ <= 0) {
    throw Error(ErrorCode::kFontInvalid, "font " + font.origin_ + ": bad unitsPerEm");
  }

  // Prefer a full-repertoire format 12 table, then any Unicode BMP format 4.
  const std::uint16_t num_sub = r.U16(cmap + 2);
  std::uint32_t best = 0;
  int best_rank = 0;
  for (std::uint16_t i = 0; i < num_sub; ++i) {
    const std::size_t rec = cmap + 4 + 8 * std::size_t{i};
    const std::uint16_t platform = r.U16(rec);
    const std::uint16_t encoding = r.U16(rec + 2);
    const std::uint32_t sub = cmap + r.U32(rec + 4);
    const std::uint16_t format = r.U16(sub);
    const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
    if (!unicode) continue;
    const int rank = format == 12 ? 2 : (format == 4 ? 1 : 0);
    if (rank > best_rank) {
      best_rank = rank;
      best = sub;
    }
  }
  if (best_rank == 0) {
    throw Error(ErrorCode::kFontInvalid, "font " + font.origin_ + ": no Unicode cmap");
  }
  font.cmap_subtable_ = best;
  font.cmap_format_ = r.U16(best);
  return font;
}

std::optional<std::uint32_t> Font::GlyphIndex(char32_t codepoint) const {
  const Reader r(bytes_, origin_);
  const std::uint32_t cp = static_cast<std::uint32_t>(codepoint);
  std::uint32_t glyph = 0;
  if (cmap_format_ == 12) {
    const std::uint32_t groups = r.U32(cmap_subtable_ + 12);
    std::uint32_t lo = 0, hi = groups;
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo) / 2;
      const std::size_t g = cmap_subtable_ + 16 + 12 * std::size_t{mid};
      const std::uint32_t start = r.U32(g), end = r.U32(g + 4);
      if (cp < start) {
        hi = mid;
      } else if (cp > end) {
        lo = mid + 1;
      } else {
        glyph = r.U32(g + 8) + (cp - start);
        break;
      }
    }
  } else {
    if (cp > 0xFFFF) return std::nullopt;
    const std::size_t base = cmap_subtable_;
    const std::uint16_t seg_count = r.U16(base + 6) / 2;
    const std::size_t ends = base + 14;
    const std::size_t starts = ends + 2 * std::size_t{seg_count} + 2;
    const std::size_t deltas = starts + 2 * std::size_t{seg_count};
    const std::size_t range_offsets = deltas + 2 * std::size_t{seg_count};
    for (std::uint16_t i = 0; i < seg_count; ++i) {
      if (cp > r.U16(ends + 2 * i)) continue;
      const std::uint16_t start = r.U16(starts + 2 * i);
      if (cp < start) break;
      const std::uint16_t delta = r.U16(deltas + 2 * i);
      const std::size_t ro_at = range_offsets + 2 * std::size_t{i};
      const std::uint16_t ro = r.U16(ro_at);
      if (ro == 0) {
        glyph = (cp + delta) & 0xFFFFu;
      } else {
        const std::uint16_t g = r.U16(ro_at + ro + 2 * (cp - start));
        glyph = g == 0 ? 0 : ((g + delta) & 0xFFFFu);
      }
      break;
    }
  }
  if (glyph == 0 || glyph >= glyph_count_) return std::nullopt;
  return glyph;
}

std::optional<std::pair<std::uint32_t, std::uint32_t>> Font::GlyphRange(
    std::uint32_t glyph_index) const {
  const Reader r(bytes_, origin_);
  if (glyph_index >= glyph_count_) {
    throw Error(ErrorCode::kFontInvalid, "font " + origin_ + ": glyph index out of range");
  }
  std::uint32_t begin, end;
  if (long_loca_) {
    begin = r.U32(loca_offset_ + 4 * std::size_t{glyph_index});
    end = r.U32(loca_offset_ + 4 * std::size_t{glyph_index} + 4);
  } else {
    begin = 2u * r.U16(loca_offset_ + 2 * std::size_t{glyph_index});
    end = 2u * r.U16(loca_offset_ + 2 * std::size_t{glyph_index} + 2);
  }
  if (end < begin || end > glyf_length_) {
    throw Error(ErrorCode::kFontInvalid, "font " + origin_ + ": corrupt loca entry");
  }
  if (begin == end) return std::nullopt;
  return std::make_pair(glyf_offset_ + begin, glyf_offset_ + end);
}

Outline Font::LoadOutline(std::uint32_t glyph_index) const {
  Outline out;
  const double identity[6] = {1, 0, 0, 1, 0, 0};
  LoadOutlineInto(glyph_index, identity, 0, out);
  return out;
}

// transform = {a, b, c, d, e, f}: x' = a*x + c*y + e, y' = b*x + d*y + f.
void Font::LoadOutlineInto(std::uint32_t glyph_index, const double transform[6], int recursion,
                           Outline& out) const {
  if (recursion > kMaxCompositeDepth) {
    throw Error(ErrorCode::kFontInvalid, "font " + origin_ + ": composite glyph too deep");
  }
  const auto range = GlyphRange(glyph_index);
  if (!range) return;
  const Reader r(bytes_, origin_);
  std::size_t at = range->first;
  const std::int16_t num_contours = r.I16(at);
  at += 10;

  if (num_contours >= 0) {
    std::vector<std::uint16_t> end_points(static_cast<std::size_t>(num_contours));
    for (auto& e : end_points) {
      e = r.U16(at);
      at += 2;
    }
    const std::size_t num_points = end_points.empty() ? 0 : std::size_t{end_points.back()} + 1;
    at += 2 + r.U16(at);  // skip instructions

    std::vector<std::uint8_t> flags;
    flags.reserve(num_points);
    while (flags.size() < num_points) {
      const std::uint8_t flag = r.U8(at++);
      flags.push_back(flag);
      if (flag & 0x08) {
        for (std::uint8_t n = r.U8(at++); n > 0 && flags.size() < num_points; --n) {
          flags.push_back(flag);
        }
      }
    }
    std::vector<double> xs(num_points), ys(num_points);
    std::int32_t v = 0;
    for (std::size_t i = 0; i < num_points; ++i) {
      if (flags[i] & 0x02) {
        const int d = r.U8(at++);
        v += (flags[i] & 0x10) ? d : -d;
      } else if (!(flags[i] & 0x10)) {
        v += r.I16(at);
        at += 2;
      }
      xs[i] = v;
    }
    v = 0;
    for (std::size_t i = 0; i < num_points; ++i) {
      if (flags[i] & 0x04) {
        const int d = r.U8(at++);
        v += (flags[i] & 0x20) ? d : -d;
      } else if (!(flags[i] & 0x20)) {
        v += r.I16(at);
        at += 2;
      }
      ys[i] = v;
    }
    std::size_t first = 0;
    for (const std::uint16_t last : end_points) {
      if (last < first || last >= num_points) {
        throw Error(ErrorCode::kFontInvalid, "font " + origin_ + ": bad contour end point");
      }
      Contour contour;
      for (std::size_t i = first; i <= last; ++i) {
        OutlinePoint p;
        p.x = transform[0] * xs[i] + transform[2] * ys[i] + transform[4];
        p.y = transform[1] * xs[i] + transform[3] * ys[i] + transform[5];
        p.on_curve = (flags[i] & 0x01) != 0;
        contour.push_back(p);
      }
      if (contour.size() >= 2) out.contours.push_back(std::move(contour));
      first = std::size_t{last} + 1;
    }
    return;
  }

  // Composite glyph.
  for (;;) {
    const std::uint16_t flags = r.U16(at);
    const std::uint16_t component = r.U16(at + 2);
    at += 4;
    double dx, dy;
    if (!(flags & 0x0002)) {
      throw Error(ErrorCode::kFontInvalid,
                  "font " + origin_ + ": point-matched composites are not supported");
    }
    if (flags & 0x0001) {
      dx = r.I16(at);
      dy = r.I16(at + 2);
      at += 4;
    } else {
      dx = static_cast<std::int8_t>(r.U8(at));
      dy = static_cast<std::int8_t>(r.U8(at + 1));
      at += 2;
    }
    double a = 1, b = 0, c = 0, d = 1;
    if (flags & 0x0008) {
      a = d = F2Dot14(r.I16(at));
      at += 2;
    } else if (flags & 0x0040) {
      a = F2Dot14(r.I16(at));
      d = F2Dot14(r.I16(at + 2));
      at += 4;
    } else if (flags & 0x0080) {
      a = F2Dot14(r.I16(at));
      b = F2Dot14(r.I16(at + 2));
      c = F2Dot14(r.I16(at + 4));
      d = F2Dot14(r.I16(at + 6));
      at += 8;
    }
    // Compose the component transform with the parent transform.
    const double* t = transform;
    const double composed[6] = {
        t[0] * a + t[2] * b,  t[1] * a + t[3] * b,  t[0] * c + t[2] * d,
        t[1] * c + t[3] * d,  t[0] * dx + t[2] * dy + t[4], t[1] * dx + t[3] * dy + t[5],
    };
    LoadOutlineInto(component, composed, recursion + 1, out);
    if (!(flags & 0x0020)) break;
  }
}

}  // namespace glyphforge
