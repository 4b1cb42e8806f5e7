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

#include "glyphforge/rasterizer.hpp"

#include <algorithm>
#include <cmath>

namespace glyphforge {

CoverageRasterizer::CoverageRasterizer(int width, int height)
    : width_(width), height_(height),
      accum_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 4, 0.0) {}

void CoverageRasterizer::AddLine(double x0, double y0, double x1, double y1) {
  if (y0 == y1) return;
  double dir = 1.0;
  if (y0 > y1) {
    std::swap(x0, x1);
    std::swap(y0, y1);
    dir = -1.0;
  }
  x0 = std::clamp(x0, 0.0, static_cast<double>(width_) - 1e-9);
  x1 = std::clamp(x1, 0.0, static_cast<double>(width_) - 1e-9);
  const double dxdy = (x1 - x0) / (y1 - y0);
  double x = x0;
  if (y0 < 0.0) x -= y0 * dxdy;
  const int row_begin = std::max(0, static_cast<int>(std::floor(y0)));
  const int row_end = std::min(height_, static_cast<int>(std::ceil(y1)));
  for (int row = row_begin; row < row_end; ++row) {
    double* line = accum_.data() + static_cast<std::size_t>(row) * width_;
    const double dy = std::min(static_cast<double>(row + 1), y1) - std::max(static_cast<double>(row), y0);
    const double xnext = x + dxdy * dy;
    const double d = dy * dir;
    const double xa = std::min(x, xnext);
    const double xb = std::max(x, xnext);
    const double xa_floor = std::floor(xa);
    const int xai = static_cast<int>(xa_floor);
    const double xb_ceil = std::ceil(xb);
    const int xbi = static_cast<int>(xb_ceil);
    if (xbi <= xai + 1) {
      // The segment stays within one pixel column.
      const double xmf = 0.5 * (x + xnext) - xa_floor;
      line[xai] += d - d * xmf;
      line[xai + 1] += d * xmf;
    } else {
      const double s = 1.0 / (xb - xa);
      const double xaf = xa - xa_floor;
      const double a0 = 0.5 * s * (1.0 - xaf) * (1.0 - xaf);
      const double xbf = xb - xb_ceil + 1.0;
      const double am = 0.5 * s * xbf * xbf;
      line[xai] += d * a0;
      if (xbi == xai + 2) {
        line[xai + 1] += d * (1.0 - a0 - am);
      } else {
        const double a1 = s * (1.5 - xaf);
        line[xai + 1] += d * (a1 - a0);
        for (int xi = xai + 2; xi < xbi - 1; ++xi) line[xi] += d * s;
        const double a2 = a1 + (xbi - xai - 3) * s;
        line[xbi - 1] += d * (1.0 - a2 - am);
      }
      line[xbi] += d * am;
    }
    x = xnext;
  }
}

void CoverageRasterizer::AddQuadratic(double x0, double y0, double cx, double cy, double x1,
                                      double y1) {
  // Subdivide so the chord deviation stays below ~0.1 px.
  const double ddx = x0 - 2.0 * cx + x1;
  const double ddy = y0 - 2.0 * cy + y1;
  const double deviation = std::hypot(ddx, ddy);
  const int segments = std::clamp(static_cast<int>(std::ceil(std::sqrt(deviation / 0.4))), 1, 64);
  double px = x0, py = y0;
  for (int i = 1; i <= segments; ++i) {
    const double t = static_cast<double>(i) / segments;
    const double mt = 1.0 - t;
    const double nx = mt * mt * x0 + 2.0 * mt * t * cx + t * t * x1;
    const double ny = mt * mt * y0 + 2.0 * mt * t * cy + t * t * y1;
    AddLine(px, py, nx, ny);
    px = nx;
    py = ny;
  }
}

std::vector<float> CoverageRasterizer::Finish() const {
  const std::size_t n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  std::vector<float> out(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += accum_[i];
    const double coverage = std::min(1.0, std::abs(acc));
    // Accumulated round-off leaves ~1e-15 residue in empty pixels.
    out[i] = coverage < 1e-6 ? 0.0f : static_cast<float>(coverage);
  }
  return out;
}

}  // namespace glyphforge
