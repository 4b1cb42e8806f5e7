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
"""Builds the subset TrueType fonts under testdata/fonts.

The inputs are the unpacked @fontsource npm packages (SIL OFL 1.1), which
ship each family as many WOFF slices. This script gathers the glyphs for the
builtin charset from all slices and writes one plain glyf-based TTF per family.

    npm pack @fontsource/noto-sans-sc ...   # then untar each into SRC/<family>
    python3 build_test_fonts.py SRC OUT
"""
import glob
import os
import sys

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.recordingPen import DecomposingRecordingPen
from fontTools.pens.ttGlyphPen import TTGlyphPen
from fontTools.ttLib import TTFont

FAMILIES = {
    "noto-sans-sc": "NotoSansSC-Subset.ttf",
    "noto-serif-sc": "NotoSerifSC-Subset.ttf",
    "ma-shan-zheng": "MaShanZheng-Subset.ttf",
    "zcool-kuaile": "ZCOOLKuaiLe-Subset.ttf",
    "zcool-qingke-huangyou": "ZCOOLQingKeHuangYou-Subset.ttf",
}


def load_charset(path):
    with open(path, encoding="utf-8") as f:
        return [ord(c) for c in f.read() if not c.isspace()]


def build(family, src_dir, out_path, codepoints):
    slices = sorted(glob.glob(os.path.join(src_dir, "files", "*-400-normal.woff")))
    found = {}
    upem = None
    for path in slices:
        font = TTFont(path)
        upem = upem or font["head"].unitsPerEm
        cmap = font.getBestCmap()
        glyph_set = font.getGlyphSet()
        for cp in codepoints:
            if cp in found or cp not in cmap:
                continue
            name = cmap[cp]
            rec = DecomposingRecordingPen(glyph_set)
            glyph_set[name].draw(rec)
            pen = TTGlyphPen(None)
            rec.replay(pen)
            found[cp] = (pen.glyph(), font["hmtx"][name])
    order = [".notdef"] + ["uni%04X" % cp for cp in sorted(found)]
    fb = FontBuilder(upem, isTTF=True)
    fb.setupGlyphOrder(order)
    fb.setupCharacterMap({cp: "uni%04X" % cp for cp in found})
    glyphs = {".notdef": TTGlyphPen(None).glyph()}
    metrics = {".notdef": (upem, 0)}
    for cp, (glyph, metric) in found.items():
        glyphs["uni%04X" % cp] = glyph
        metrics["uni%04X" % cp] = metric
    fb.setupGlyf(glyphs)
    fb.setupHorizontalMetrics(metrics)
    fb.setupHorizontalHeader(ascent=int(upem * 0.88), descent=-int(upem * 0.12))
    fb.setupNameTable({"familyName": family + " subset", "styleName": "Regular"})
    fb.setupOS2()
    fb.setupPost()
    fb.save(out_path)
    missing = [cp for cp in codepoints if cp not in found]
    print(f"{out_path}: {len(found)} glyphs, {len(missing)} missing")


def main():
    src, out = sys.argv[1], sys.argv[2]
    here = os.path.dirname(os.path.abspath(__file__))
    codepoints = load_charset(os.path.join(here, "..", "..", "core", "data", "builtin_charset.txt"))
    os.makedirs(out, exist_ok=True)
    for family, filename in FAMILIES.items():
        build(family, os.path.join(src, family), os.path.join(out, filename), codepoints)


if __name__ == "__main__":
    main()
