#!/usr/bin/env python3
# Copyright 2026 The GlyphForge Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes testdata/fonts/Fixture-Holes.ttf for error-path tests.

Starts from ZCOOLKuaiLe-Subset.ttf, keeps the first 16 builtin characters
except U+4E0D, and maps U+3000 to a glyph with no contours.

    python3 make_fixture_font.py testdata/fonts core/data/builtin_charset.txt
"""
import os
import sys

from fontTools import subset
from fontTools.pens.ttGlyphPen import TTGlyphPen
from fontTools.ttLib import TTFont

HOLE = 0x4E0D
BLANK = 0x3000


def main(font_dir, charset_path):
    with open(charset_path, encoding="utf-8") as f:
        chars = [c for c in f.read() if not c.isspace()][:16]
    keep = [ord(c) for c in chars if ord(c) != HOLE]

    font = TTFont(os.path.join(font_dir, "ZCOOLKuaiLe-Subset.ttf"))
    options = subset.Options()
    options.notdef_outline = True
    options.name_IDs = ["*"]
    sub = subset.Subsetter(options)
    sub.populate(unicodes=keep)
    sub.subset(font)

    order = font.getGlyphOrder() + ["blank"]
    font.setGlyphOrder(order)
    font["glyf"].glyphOrder = order
    font["glyf"]["blank"] = TTGlyphPen(None).glyph()
    font["hmtx"]["blank"] = (font["hhea"].advanceWidthMax, 0)
    for table in font["cmap"].tables:
        if table.isUnicode():
            table.cmap[BLANK] = "blank"
    font.save(os.path.join(font_dir, "Fixture-Holes.ttf"))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
