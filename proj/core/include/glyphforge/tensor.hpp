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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace glyphforge {

// Dense NCHW tensor with contiguous storage.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int c, int h, int w, T fill = T{0})
      : shape_{n, c, h, w},
        data_(static_cast<std::size_t>(n) * c * h * w, fill) {}

  int n() const { return shape_[0]; }
  int c() const { return shape_[1]; }
  int h() const { return shape_[2]; }
  int w() const { return shape_[3]; }
  const std::array<int, 4>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane_size() const { return static_cast<std::size_t>(shape_[2]) * shape_[3]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T* plane(int n, int c) {
    return data_.data() + (static_cast<std::size_t>(n) * shape_[1] + c) * plane_size();
  }
  const T* plane(int n, int c) const {
    return data_.data() + (static_cast<std::size_t>(n) * shape_[1] + c) * plane_size();
  }
  T& at(int n, int c, int y, int x) { return plane(n, c)[static_cast<std::size_t>(y) * shape_[3] + x]; }
  const T& at(int n, int c, int y, int x) const {
    return plane(n, c)[static_cast<std::size_t>(y) * shape_[3] + x];
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::array<int, 4> shape_{0, 0, 0, 0};
  std::vector<T> data_;
};

template <typename To, typename From>
Tensor<To> TensorCast(const Tensor<From>& in) {
  Tensor<To> out(in.n(), in.c(), in.h(), in.w());
  for (std::size_t i = 0; i < in.size(); ++i) out.data()[i] = static_cast<To>(in.data()[i]);
  return out;
}

}  // namespace glyphforge
