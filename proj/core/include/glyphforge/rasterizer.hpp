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

#include <vector>

namespace glyphforge {

// Exact-area anti-aliased scanline rasterizer. Lines are accumulated as
// signed area/cover deltas; Finish() prefix-sums each row and returns the
// nonzero-style coverage clamped to [0,1]. Coordinates are in pixels with
// y pointing down; the caller keeps geometry inside [0,width)x[0,height).
class CoverageRasterizer {
 public:
  CoverageRasterizer(int width, int height);

  void AddLine(double x0, double y0, double x1, double y1);
  void AddQuadratic(double x0, double y0, double cx, double cy, double x1, double y1);

  std::vector<float> Finish() const;

 private:
  int width_;
  int height_;
  std::vector<double> accum_;
};

}  // namespace glyphforge
